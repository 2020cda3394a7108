#pragma once

// Fisher-Hartwig symbols f(z) = exp(V(z)) prod_i |z - e^{i u_i}|^{beta_i},
// their Fourier coefficients, Toeplitz determinants, orthogonal polynomials
// on the unit circle, Szego functions and the t-deformation
// f_t = (1 - t + t e^V) prod_i |z - e^{i u_i}|^{beta_i}.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cuechaos/cue_sampler.hpp"
#include "cuechaos/errors.hpp"
#include "cuechaos/fft.hpp"

namespace cuechaos {

inline constexpr double kPi = std::numbers::pi;

/// Maps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

/// d(theta, theta') = min(|theta - theta'|, 2 pi - |theta - theta'|).
inline double circle_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

/// Coefficients c_j for j = -half..half.
class LaurentCoefficients {
 public:
  LaurentCoefficients() = default;
  LaurentCoefficients(int half, std::vector<cplx> values) : half_(half), values_(std::move(values)) {
    if (half < 0 || values_.size() != static_cast<std::size_t>(2 * half + 1))
      throw InvalidArgument("LaurentCoefficients: size mismatch");
  }

  int half() const { return half_; }
  cplx operator()(int j) const {
    if (j < -half_ || j > half_) throw InvalidArgument("LaurentCoefficients: index out of range");
    return values_[static_cast<std::size_t>(j + half_)];
  }
  const std::vector<cplx>& values() const { return values_; }

 private:
  int half_ = 0;
  std::vector<cplx> values_{0.0};
};

struct Singularity {
  double angle = 0.0;     // in (-pi, pi]
  double exponent = 0.0;  // >= 0
};

/// Parameters of the symbol used for exponential moments of the
/// characteristic polynomial (rotated so the singularities sit at +-u).
struct SymbolParams {
  double theta = 0.0;
  double theta_prime = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  int k1 = 1;
  int k2 = 1;
  std::map<int, cplx> t_coeffs;  // T_k for 0 < |k| <= m, real-valued family
  double beta1 = 0.0;
  double beta2 = 0.0;
};

/// Completes {T_k, k > 0} with T_{-k} = conj(T_k).
inline std::map<int, cplx> real_laurent_family(const std::map<int, cplx>& positive) {
  std::map<int, cplx> out;
  for (const auto& [k, v] : positive) {
    if (k <= 0) throw InvalidArgument("real_laurent_family: indices must be positive");
    out[k] = v;
    out[-k] = std::conj(v);
  }
  return out;
}

struct Symbol {
  std::map<int, cplx> laurent;  // V_j
  std::vector<Singularity> singularities;
  bool real_valued = true;
  std::optional<SymbolParams> params;
  double u = 0.0;    // half-distance of the two singularities (built symbols)
  double phi = 0.0;  // rotation angle (built symbols)

  int degree() const {
    int d = 0;
    for (const auto& [j, v] : laurent) d = std::max(d, std::abs(j));
    return d;
  }

  cplx potential(cplx z) const {
    cplx s = 0.0;
    for (const auto& [j, v] : laurent) s += v * std::pow(z, j);
    return s;
  }

  cplx potential_on_circle(double theta) const {
    cplx s = 0.0;
    for (const auto& [j, v] : laurent) s += v * std::polar(1.0, j * theta);
    return s;
  }

  double singular_factor(double theta) const {
    double p = 1.0;
    for (const auto& s : singularities)
      if (s.exponent != 0.0) p *= std::pow(std::abs(2.0 * std::sin(0.5 * (theta - s.angle))), s.exponent);
    return p;
  }

  /// f(e^{i theta}).
  cplx value(double theta) const { return std::exp(potential_on_circle(theta)) * singular_factor(theta); }

  void validate() const {
    for (const auto& s : singularities) {
      if (!(s.exponent >= 0.0)) throw InvalidArgument("Symbol: exponents must be nonnegative");
      if (!(s.angle > -kPi - 1e-12 && s.angle <= kPi + 1e-12))
        throw InvalidArgument("Symbol: singularity angle outside (-pi, pi]");
    }
    if (real_valued)
      for (const auto& [j, v] : laurent) {
        const auto it = laurent.find(-j);
        const cplx partner = it == laurent.end() ? cplx{0.0} : it->second;
        if (std::abs(partner - std::conj(v)) > 1e-12 * (1.0 + std::abs(v)))
          throw InvalidArgument("Symbol: real-valued flag requires V_{-j} = conj(V_j)");
      }
  }
};

/// Pure Fisher-Hartwig symbol with one singularity at e^{i angle}.
inline Symbol single_singularity_symbol(double exponent, double angle = 0.0) {
  Symbol s;
  s.singularities.push_back({wrap_angle(angle), exponent});
  s.validate();
  return s;
}

/// True when theta - theta' lies in (0, pi) u (-2pi, -pi), extended by
/// the boundary value pi; the singularity at +u then carries beta1.
inline bool in_first_arc_set(double delta) {
  return (delta > 0.0 && delta <= kPi) || (delta > -2.0 * kPi && delta < -kPi);
}

/// Symbol of the exponential moment
///   E exp(Tr T(U) + a1 X_{N,K1}(th) + a2 X_{N,K2}(th) + b1 X_N(th) + b2 X_N(th')),
/// rotated by phi so that the singularities sit at +-u, u = d(th, th')/2.
/// theta == theta' merges the two singularities into one of exponent b1 + b2.
inline Symbol build_symbol(const SymbolParams& p) {
  if (!(p.theta >= 0.0 && p.theta < 2.0 * kPi && p.theta_prime >= 0.0 && p.theta_prime < 2.0 * kPi))
    throw InvalidArgument("build_symbol: angles must lie in [0, 2pi)");
  if (p.k1 < 1 || p.k2 < p.k1) throw InvalidArgument("build_symbol: need 1 <= k1 <= k2");
  if (p.beta1 < 0.0 || p.beta2 < 0.0) throw InvalidArgument("build_symbol: exponents must be >= 0");
  for (const auto& [k, v] : p.t_coeffs) {
    if (k == 0) throw InvalidArgument("build_symbol: T has no constant term");
    const auto it = p.t_coeffs.find(-k);
    const cplx partner = it == p.t_coeffs.end() ? cplx{0.0} : it->second;
    if (std::abs(partner - std::conj(v)) > 1e-12 * (1.0 + std::abs(v)))
      throw InvalidArgument("build_symbol: T must be real-valued (T_{-k} = conj T_k)");
  }

  const double delta = p.theta - p.theta_prime;
  const double d = circle_distance(p.theta, p.theta_prime);
  Symbol s;
  s.params = p;
  s.u = d / 2.0;
  s.phi = std::abs(delta) <= kPi ? (p.theta + p.theta_prime) / 2.0
                                 : (p.theta + p.theta_prime + 2.0 * kPi) / 2.0;
  const bool first = in_first_arc_set(delta);
  // In the first set the alpha terms carry z^j e^{-iju}; the roles swap in
  // the second.
  const double sign = first ? 1.0 : -1.0;
  for (const auto& [k, v] : p.t_coeffs) s.laurent[k] += v * std::polar(1.0, k * s.phi);
  auto add_alpha = [&](double alpha, int kmax) {
    if (alpha == 0.0) return;
    for (int j = 1; j <= kmax; ++j) {
      s.laurent[j] -= alpha / (2.0 * j) * std::polar(1.0, -sign * j * s.u);
      s.laurent[-j] -= alpha / (2.0 * j) * std::polar(1.0, sign * j * s.u);
    }
  };
  add_alpha(p.alpha1, p.k1);
  add_alpha(p.alpha2, p.k2);
  std::erase_if(s.laurent, [](const auto& kv) { return kv.second == cplx{0.0}; });

  if (d == 0.0) {
    s.singularities.push_back({0.0, p.beta1 + p.beta2});
  } else {
    const double b_plus = first ? p.beta1 : p.beta2;
    const double b_minus = first ? p.beta2 : p.beta1;
    s.singularities.push_back({s.u, b_plus});
    s.singularities.push_back({-s.u, b_minus});
  }
  s.validate();
  return s;
}

namespace detail {

/// g_j for |z - e^{i angle}|^beta on j = -half..half:
///   (-1)^j Gamma(1+beta) / (Gamma(1+beta/2+j) Gamma(1+beta/2-j)) e^{-ij angle}.
/// g_0 from log-gamma, then g_{j+1} = g_j (j - beta/2) / (j + 1 + beta/2).
inline std::vector<cplx> singular_family(double beta, double angle, int half) {
  std::vector<cplx> out(static_cast<std::size_t>(2 * half + 1));
  const double a = beta / 2.0;
  double g = std::exp(std::lgamma(1.0 + beta) - 2.0 * std::lgamma(1.0 + a));
  for (int j = 0; j <= half; ++j) {
    out[static_cast<std::size_t>(half + j)] = g * std::polar(1.0, -j * angle);
    out[static_cast<std::size_t>(half - j)] = g * std::polar(1.0, j * angle);
    g *= (j - a) / (j + 1.0 + a);
  }
  return out;
}

inline constexpr double kCoefficientTolerance = 1e-10;
inline constexpr std::size_t kMaxResolution = std::size_t{1} << 20;

/// Fourier coefficients of prod_i |z - e^{i u_i}|^{beta_i} for |j| <= need.
/// Several singularities: truncated convolution of the closed-form families,
/// doubling the truncation until successive results agree.
inline std::vector<cplx> singular_product(const std::vector<Singularity>& sings, int need) {
  std::vector<Singularity> active;
  for (const auto& s : sings)
    if (s.exponent != 0.0) active.push_back(s);
  if (active.empty()) {
    std::vector<cplx> out(static_cast<std::size_t>(2 * need + 1));
    out[static_cast<std::size_t>(need)] = 1.0;
    return out;
  }
  if (active.size() == 1) return singular_family(active[0].exponent, active[0].angle, need);

  auto attempt = [&](int trunc) {
    std::vector<cplx> acc = singular_family(active[0].exponent, active[0].angle, trunc);
    for (std::size_t i = 1; i < active.size(); ++i)
      acc = convolve(acc, singular_family(active[i].exponent, active[i].angle, trunc));
    const int center = static_cast<int>(active.size()) * trunc;
    return std::vector<cplx>(acc.begin() + (center - need), acc.begin() + (center + need + 1));
  };
  int trunc = std::max(4 * need, 1024);
  auto prev = attempt(trunc);
  while (true) {
    trunc *= 2;
    if (static_cast<std::size_t>(trunc) * active.size() * 2 > kMaxResolution * 4)
      throw PrecisionFailure("singular coefficients did not converge");
    auto next = attempt(trunc);
    double diff = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      diff = std::max(diff, std::abs(next[i] - prev[i]));
      scale = std::max(scale, std::abs(next[i]));
    }
    prev = std::move(next);
    if (diff <= kCoefficientTolerance * scale) return prev;
  }
}

/// Fourier coefficients of a smooth circle function by sampling with
/// resolution doubling. `check` sees every sample (to reject inadmissible
/// values). Returns c_j for |j| < G/2 at the final resolution G.
inline LaurentCoefficients smooth_coefficients(const std::function<cplx(double)>& h,
                                               int min_half,
                                               const std::function<void(cplx)>& check) {
  std::size_t grid = next_power_of_two(static_cast<std::size_t>(std::max(64, 4 * (min_half + 1))));
  auto sample = [&](std::size_t g_count) {
    std::vector<cplx> v(g_count);
    for (std::size_t g = 0; g < g_count; ++g) {
      v[g] = h(2.0 * kPi * static_cast<double>(g) / static_cast<double>(g_count));
      if (check) check(v[g]);
    }
    return fourier_from_samples(v, g_count / 2 - 1);
  };
  auto prev = sample(grid);
  while (true) {
    grid *= 2;
    if (grid > kMaxResolution) throw PrecisionFailure("smooth coefficients did not converge");
    auto next = sample(grid);
    const int prev_half = static_cast<int>(prev.size() / 2);
    const int next_half = static_cast<int>(next.size() / 2);
    double diff = 0.0, scale = 1.0;
    for (int j = -next_half; j <= next_half; ++j) {
      const cplx a = next[static_cast<std::size_t>(j + next_half)];
      const cplx b = std::abs(j) <= prev_half ? prev[static_cast<std::size_t>(j + prev_half)] : 0.0;
      diff = std::max(diff, std::abs(a - b));
      scale = std::max(scale, std::abs(a));
    }
    if (diff <= kCoefficientTolerance * scale) {
      // Drop the numerically empty tail.
      int keep = next_half;
      while (keep > min_half && std::abs(next[static_cast<std::size_t>(next_half + keep)]) < 1e-18 * scale &&
             std::abs(next[static_cast<std::size_t>(next_half - keep)]) < 1e-18 * scale)
        --keep;
      std::vector<cplx> vals(next.begin() + (next_half - keep), next.begin() + (next_half + keep + 1));
      return LaurentCoefficients(keep, std::move(vals));
    }
    prev = std::move(next);
  }
}

/// Coefficients of smooth * singular for |j| <= count.
inline LaurentCoefficients combine(const LaurentCoefficients& smooth,
                                   const std::vector<Singularity>& sings, int count,
                                   bool real_valued) {
  const int hs = smooth.half();
  const int need = count + hs;
  const auto sing = singular_product(sings, need);
  std::vector<cplx> out(static_cast<std::size_t>(2 * count + 1));
  for (int j = -count; j <= count; ++j) {
    cplx acc = 0.0;
    for (int k = -hs; k <= hs; ++k) acc += smooth(k) * sing[static_cast<std::size_t>(j - k + need)];
    out[static_cast<std::size_t>(j + count)] = acc;
  }
  if (real_valued) {
    for (int j = 0; j <= count; ++j) {
      const cplx a = out[static_cast<std::size_t>(count + j)];
      const cplx b = out[static_cast<std::size_t>(count - j)];
      const cplx sym = 0.5 * (a + std::conj(b));
      out[static_cast<std::size_t>(count + j)] = sym;
      out[static_cast<std::size_t>(count - j)] = std::conj(sym);
    }
  }
  return LaurentCoefficients(count, std::move(out));
}

}  // namespace detail

/// f_j = (1/2pi) int f(e^{i theta}) e^{-ij theta} d theta for |j| <= count.
inline LaurentCoefficients fourier_coefficients(const Symbol& symbol, int count) {
  if (count < 0) throw InvalidArgument("fourier_coefficients: count must be >= 0");
  symbol.validate();
  const auto smooth = symbol.laurent.empty()
                          ? LaurentCoefficients(0, {1.0})
                          : detail::smooth_coefficients(
                                [&](double th) { return std::exp(symbol.potential_on_circle(th)); },
                                symbol.degree(), {});
  return detail::combine(smooth, symbol.singularities, count, symbol.real_valued);
}

/// Coefficients of f_t = (1 - t + t e^V) * singular factors, |j| <= count.
inline LaurentCoefficients deform_symbol(const Symbol& symbol, double t, int count) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("deform_symbol: t must lie in [0, 1]");
  if (count < 0) throw InvalidArgument("deform_symbol: count must be >= 0");
  symbol.validate();
  if (symbol.laurent.empty() || t == 0.0)
    return detail::combine(LaurentCoefficients(0, {1.0}), symbol.singularities, count, symbol.real_valued);
  const auto smooth = detail::smooth_coefficients(
      [&](double th) { return 1.0 - t + t * std::exp(symbol.potential_on_circle(th)); },
      symbol.degree(), [&](cplx v) {
        if (!(v.real() > 0.0) || std::abs(v.imag()) > 1e-9 * std::abs(v))
          throw InvalidSymbol("deform_symbol: 1 - t + t e^V is not positive on the circle");
      });
  return detail::combine(smooth, symbol.singularities, count, symbol.real_valued);
}

struct ToeplitzDet {
  cplx value = 0.0;
  double log_abs = -INFINITY;
  bool degenerate = false;
};

inline Eigen::MatrixXcd toeplitz_matrix(const LaurentCoefficients& fhat, int n) {
  if (n < 1) throw InvalidArgument("toeplitz_matrix: n must be >= 1");
  if (fhat.half() < n - 1) throw InvalidArgument("toeplitz_matrix: coefficients do not span |j| <= n-1");
  Eigen::MatrixXcd t(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) t(j, k) = fhat(j - k);
  return t;
}

/// D_{n-1} = det(f_{j-k})_{j,k<n} by partially pivoted elimination.
inline ToeplitzDet toeplitz_det(const LaurentCoefficients& fhat, int n) {
  const Eigen::MatrixXcd t = toeplitz_matrix(fhat, n);
  const double scale = t.cwiseAbs().maxCoeff();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(t);
  const Eigen::MatrixXcd& packed = lu.matrixLU();
  ToeplitzDet out;
  double log_abs = 0.0;
  for (int i = 0; i < n; ++i) {
    const double piv = std::abs(packed(i, i));
    if (scale == 0.0 || piv <= 1e-14 * scale) {
      out.degenerate = true;
      return out;
    }
    log_abs += std::log(piv);
  }
  out.value = lu.determinant();
  out.log_abs = log_abs;
  return out;
}

/// Leading coefficients chi_j and determinants D_j for j = 0..n-1.
struct ToeplitzResult {
  std::vector<double> dets;
  std::vector<double> log_dets;
  std::vector<double> chis;
  std::vector<cplx> verblunsky;  // recursion coefficients alpha_0..alpha_{n-2}
};

/// Monic orthogonal polynomials Phi_order and Phi_{order-1} with the norms
/// ||Phi_k||^2 = D_k / D_{k-1} for k <= order (Szego-Levinson recursion).
struct OpucRecursion {
  std::vector<double> norms2;
  std::vector<cplx> verblunsky;
  std::vector<cplx> phi;       // Phi_order, ascending
  std::vector<cplx> phi_prev;  // Phi_{order-1}, ascending (empty for order 0)
};

inline void require_hermitian(const LaurentCoefficients& fhat, int upto) {
  for (int j = 0; j <= upto; ++j)
    if (std::abs(fhat(-j) - std::conj(fhat(j))) > 1e-10 * (1.0 + std::abs(fhat(j))))
      throw InvalidArgument("opuc: moment matrix is not Hermitian");
}

inline OpucRecursion szego_levinson(const LaurentCoefficients& fhat, int order) {
  if (order < 0) throw InvalidArgument("szego_levinson: order must be >= 0");
  if (fhat.half() < order) throw InvalidArgument("szego_levinson: coefficients do not span |j| <= order");
  require_hermitian(fhat, order);
  OpucRecursion r;
  const double f0 = fhat(0).real();
  if (!(f0 > 0.0)) throw PrecisionFailure("szego_levinson: f_0 must be positive");
  r.norms2.push_back(f0);
  std::vector<cplx> phi{1.0};
  for (int k = 0; k < order; ++k) {
    // conj(alpha_k) = <z Phi_k, 1> / ||Phi_k||^2 with <z^a, z^b> = f_{b-a}.
    cplx inner = 0.0;
    for (int m = 0; m <= k; ++m) inner += phi[static_cast<std::size_t>(m)] * fhat(-(m + 1));
    const cplx alpha = std::conj(inner / r.norms2.back());
    const double shrink = 1.0 - std::norm(alpha);
    if (!(shrink > 0.0)) throw PrecisionFailure("szego_levinson: lost positive definiteness");
    std::vector<cplx> next(static_cast<std::size_t>(k + 2));
    for (int m = 0; m <= k; ++m) {
      next[static_cast<std::size_t>(m + 1)] += phi[static_cast<std::size_t>(m)];
      // Phi_k^* has coefficient conj(phi[k-m]) at z^m.
      next[static_cast<std::size_t>(m)] -= std::conj(alpha) * std::conj(phi[static_cast<std::size_t>(k - m)]);
    }
    r.verblunsky.push_back(alpha);
    r.norms2.push_back(r.norms2.back() * shrink);
    r.phi_prev = std::move(phi);
    phi = std::move(next);
  }
  r.phi = std::move(phi);
  return r;
}

/// chi_j = sqrt(D_{j-1} / D_j) by the O(n^2) recursion, j = 0..n-1.
inline ToeplitzResult opuc_chi(const LaurentCoefficients& fhat, int n) {
  if (n < 1) throw InvalidArgument("opuc_chi: n must be >= 1");
  const auto rec = szego_levinson(fhat, n - 1);
  ToeplitzResult out;
  double log_d = 0.0;
  for (int j = 0; j < n; ++j) {
    const double nrm = rec.norms2[static_cast<std::size_t>(j)];
    log_d += std::log(nrm);
    out.log_dets.push_back(log_d);
    out.dets.push_back(std::exp(log_d));
    out.chis.push_back(1.0 / std::sqrt(nrm));
  }
  out.verblunsky = rec.verblunsky;
  return out;
}

/// D_{n-1} by elimination, checked against the chi-product route.
/// Throws ConsistencyAlarm when the two disagree beyond `tolerance`.
inline double checked_log_det(const LaurentCoefficients& fhat, int n, double tolerance = 1e-8) {
  const auto direct = toeplitz_det(fhat, n);
  if (direct.degenerate) throw PrecisionFailure("checked_log_det: degenerate Toeplitz matrix");
  const auto chi = opuc_chi(fhat, n);
  const double rel = std::abs(std::expm1(chi.log_dets.back() - direct.log_abs));
  if (rel > tolerance)
    throw ConsistencyAlarm("Toeplitz determinant routes disagree: rel " + std::to_string(rel));
  return direct.log_abs;
}

/// Polynomial first column of the orthogonal-polynomial matrix at level n:
/// Y11 = Phi_n (monic), Y21 = -chi_{n-1}^2 Phi_{n-1}^*(z).
class YFirstColumn {
 public:
  YFirstColumn(const LaurentCoefficients& fhat, int n) : n_(n) {
    if (n < 1) throw InvalidArgument("y_first_column: n must be >= 1");
    const auto rec = szego_levinson(fhat, n);
    y11_ = rec.phi;
    const double chi2 = 1.0 / rec.norms2[static_cast<std::size_t>(n - 1)];
    const auto& prev = rec.phi_prev;
    y21_.resize(prev.size());
    for (std::size_t m = 0; m < prev.size(); ++m) y21_[m] = -chi2 * std::conj(prev[prev.size() - 1 - m]);
  }

  struct Values {
    cplx y11, y21, dy11, dy21;
  };

  Values at(cplx z) const {
    Values v{};
    horner(y11_, z, v.y11, v.dy11);
    horner(y21_, z, v.y21, v.dy21);
    return v;
  }

  const std::vector<cplx>& y11() const { return y11_; }
  const std::vector<cplx>& y21() const { return y21_; }
  int n() const { return n_; }

 private:
  static void horner(const std::vector<cplx>& c, cplx z, cplx& val, cplx& der) {
    val = 0.0;
    der = 0.0;
    for (std::size_t m = c.size(); m-- > 0;) {
      der = der * z + val;
      val = val * z + c[m];
    }
  }

  int n_;
  std::vector<cplx> y11_, y21_;
};

inline YFirstColumn::Values y_first_column(const LaurentCoefficients& fhat, int n, cplx z) {
  return YFirstColumn(fhat, n).at(z);
}

enum class SzegoSide { kInside, kOutside };

namespace detail {

// Angle of w shifted into (lo, lo + 2 pi).
inline double arg_in_window(cplx w, double lo) {
  double a = std::arg(w);
  while (a <= lo) a += 2.0 * kPi;
  while (a > lo + 2.0 * kPi) a -= 2.0 * kPi;
  return a;
}

inline bool on_ray(cplx z, double angle, double r_min) {
  const double r = std::abs(z);
  if (r < r_min - 1e-14) return false;
  if (r == 0.0) return r_min == 0.0;
  return std::abs(wrap_angle(std::arg(z) - angle)) < 1e-13;
}

}  // namespace detail

/// Szego function D_in(z) (side = inside) or D_out(z) (side = outside).
/// For each singularity e^{iv}: arg(z - e^{iv}) and arg z are taken in
/// (v, v + 2pi), so the inside cut is e^{iv}[1, inf) and the outside one
/// e^{iv}[0, inf). On the circle, f = D_in * D_out^{-1}.
inline cplx szego_function(const Symbol& symbol, cplx z, SzegoSide side) {
  cplx log_val = 0.0;
  for (const auto& s : symbol.singularities) {
    if (s.exponent == 0.0) continue;
    const double r_min = side == SzegoSide::kInside ? 1.0 : 0.0;
    if (detail::on_ray(z, s.angle, r_min)) throw BranchCutError("szego_function: z lies on a branch cut");
    const cplx w = z - std::polar(1.0, s.angle);
    const cplx log_w(std::log(std::abs(w)), detail::arg_in_window(w, s.angle));
    const double half = s.exponent / 2.0;
    if (side == SzegoSide::kInside) {
      log_val += half * log_w - cplx(0.0, half * (s.angle + kPi));
    } else {
      const cplx log_z(std::log(std::abs(z)), detail::arg_in_window(z, s.angle));
      log_val += half * (log_w - log_z);  // this is log D_out^{-1}
    }
  }
  cplx smooth = 0.0;
  for (const auto& [j, v] : symbol.laurent) {
    if (side == SzegoSide::kInside && j >= 0) smooth += v * std::pow(z, j);
    if (side == SzegoSide::kOutside && j < 0) smooth += v * std::pow(z, j);
  }
  log_val += smooth;
  return side == SzegoSide::kInside ? std::exp(log_val) : std::exp(-log_val);
}

struct DifferentialIdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_diff = 0.0;
  std::size_t grid_used = 0;
};

/// log D_{n-1}(f_t).
inline double deformed_log_det(const Symbol& symbol, double t, int n) {
  const auto d = toeplitz_det(deform_symbol(symbol, t, n - 1), n);
  if (d.degenerate) throw PrecisionFailure("deformed_log_det: degenerate determinant");
  return d.log_abs;
}

/// Compares d/dt log D_{n-1}(f_t) from Richardson-extrapolated finite
/// differences with the contour integral
///   (1/2 pi i) oint z^{-n} (Y11 Y21' - Y21 Y11') d_t f_t dz
/// evaluated by the trapezoidal rule, doubling the grid until the value
/// moves by less than 1e-6.
inline DifferentialIdentityCheck differential_identity_check(const Symbol& symbol, int n, double t,
                                                             std::size_t grid_size = 256) {
  if (n < 1 || n > 32) throw InvalidArgument("differential_identity_check: need 1 <= n <= 32");
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("differential_identity_check: t must lie in [0, 1]");
  if (!is_power_of_two(grid_size)) throw InvalidArgument("differential_identity_check: grid must be 2^k");

  auto L = [&](double s) { return deformed_log_det(symbol, s, n); };
  constexpr double h0 = 0.1;
  double lhs = 0.0;
  if (t - h0 >= 0.0 && t + h0 <= 1.0) {
    auto central = [&](double h) { return (L(t + h) - L(t - h)) / (2.0 * h); };
    auto r1 = [&](double h) { return (4.0 * central(h / 2) - central(h)) / 3.0; };
    lhs = (16.0 * r1(h0 / 2) - r1(h0)) / 15.0;
  } else {
    // Second-order one-sided stencil pointing into [0, 1], extrapolated twice.
    const double dir = t + 2.0 * h0 <= 1.0 ? 1.0 : -1.0;
    const double l0 = L(t);
    auto one_sided = [&](double h) {
      return dir * (-3.0 * l0 + 4.0 * L(t + dir * h) - L(t + 2.0 * dir * h)) / (2.0 * h);
    };
    auto r1 = [&](double h) { return (4.0 * one_sided(h / 2) - one_sided(h)) / 3.0; };
    auto r2 = [&](double h) { return (8.0 * r1(h / 2) - r1(h)) / 7.0; };
    lhs = (16.0 * r2(h0 / 2) - r2(h0)) / 15.0;
  }

  const YFirstColumn y(deform_symbol(symbol, t, n), n);
  auto contour = [&](std::size_t grid) {
    double acc = 0.0;
    for (std::size_t g = 0; g < grid; ++g) {
      const double th = 2.0 * kPi * static_cast<double>(g) / static_cast<double>(grid);
      const cplx z = std::polar(1.0, th);
      const auto v = y.at(z);
      const cplx dft_dt = (std::exp(symbol.potential_on_circle(th)) - 1.0) * symbol.singular_factor(th);
      // dz = i z d theta turns (1/2 pi i) oint into a plain angular average.
      acc += std::real(std::pow(z, 1 - n) * (v.y11 * v.dy21 - v.y21 * v.dy11) * dft_dt);
    }
    return acc / static_cast<double>(grid);
  };
  std::size_t grid = grid_size;
  double prev = contour(grid);
  while (true) {
    grid *= 2;
    if (grid > (std::size_t{1} << 22)) throw PrecisionFailure("differential identity quadrature did not settle");
    const double next = contour(grid);
    const bool done = std::abs(next - prev) < 1e-6;
    prev = next;
    if (done) break;
  }
  return {lhs, prev, std::abs(lhs - prev), grid};
}

/// prod_j f(e^{i theta_j}) over the spectrum of a draw, via traces and the
/// secular polynomial: exp(n V_0 + sum_{k != 0} V_k Tr U^k) prod_i |Phi(e^{iu_i})|^{beta_i}.
inline cplx product_over_spectrum(const Symbol& symbol, const CueSample& sample) {
  cplx expo = 0.0;
  for (const auto& [k, v] : symbol.laurent) expo += v * sample.trace(k);
  double sing = 1.0;
  for (const auto& s : symbol.singularities)
    if (s.exponent != 0.0) sing *= std::pow(std::abs(sample.char_poly(std::polar(1.0, s.angle))), s.exponent);
  return std::exp(expo) * sing;
}

/// Tr T(U) + a1 X_{N,K1}(th) + a2 X_{N,K2}(th) + b1 X_N(th) + b2 X_N(th'),
/// evaluated from the unrotated definition.
inline double moment_exponent(const SymbolParams& p, const CueSample& sample) {
  cplx tr = 0.0;
  for (const auto& [k, v] : p.t_coeffs) tr += v * sample.trace(k);
  double e = tr.real();
  if (p.alpha1 != 0.0) e += p.alpha1 * sample.truncated_field(p.k1, p.theta);
  if (p.alpha2 != 0.0) e += p.alpha2 * sample.truncated_field(p.k2, p.theta);
  if (p.beta1 != 0.0) e += p.beta1 * sample.log_abs_char_poly(p.theta);
  if (p.beta2 != 0.0) e += p.beta2 * sample.log_abs_char_poly(p.theta_prime);
  return e;
}

// Corpus records, one per line (blank lines and '#' comments skipped):
//   theta theta_prime alpha1 alpha2 k1 k2 m T1_re T1_im ... Tm_re Tm_im beta1 beta2
// T_{-k} = conj(T_k) is implied.

inline SymbolParams parse_symbol_record(const std::string& line) {
  std::istringstream in(line);
  SymbolParams p;
  int m = 0;
  if (!(in >> p.theta >> p.theta_prime >> p.alpha1 >> p.alpha2 >> p.k1 >> p.k2 >> m) || m < 0)
    throw InvalidArgument("symbol record: malformed header fields: " + line);
  std::map<int, cplx> pos;
  for (int k = 1; k <= m; ++k) {
    double re = 0.0, im = 0.0;
    if (!(in >> re >> im)) throw InvalidArgument("symbol record: missing T coefficient: " + line);
    if (re != 0.0 || im != 0.0) pos[k] = {re, im};
  }
  if (!(in >> p.beta1 >> p.beta2)) throw InvalidArgument("symbol record: missing exponents: " + line);
  std::string extra;
  if (in >> extra) throw InvalidArgument("symbol record: trailing fields: " + line);
  p.t_coeffs = real_laurent_family(pos);
  return p;
}

inline std::vector<SymbolParams> read_symbol_corpus(std::istream& in) {
  std::vector<SymbolParams> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_symbol_record(line));
  }
  return out;
}

inline std::string format_symbol_record(const SymbolParams& p) {
  std::ostringstream os;
  os.precision(17);
  int m = 0;
  for (const auto& [k, v] : p.t_coeffs) m = std::max(m, k);
  os << p.theta << ' ' << p.theta_prime << ' ' << p.alpha1 << ' ' << p.alpha2 << ' ' << p.k1 << ' '
     << p.k2 << ' ' << m;
  for (int k = 1; k <= m; ++k) {
    const auto it = p.t_coeffs.find(k);
    const cplx v = it == p.t_coeffs.end() ? cplx{0.0} : it->second;
    os << ' ' << v.real() << ' ' << v.imag();
  }
  os << ' ' << p.beta1 << ' ' << p.beta2;
  return os.str();
}

}  // namespace cuechaos
