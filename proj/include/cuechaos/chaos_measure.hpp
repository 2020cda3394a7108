#pragma once

// Normalized chaos measures e^{beta X(theta)} / E e^{beta X(theta)} dtheta/2pi
// built from full, truncated or Gaussian fields; their total masses; the
// barrier decomposition of the mass; and biased-measure estimators.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cuechaos/cue_sampler.hpp"
#include "cuechaos/errors.hpp"
#include "cuechaos/gaussian_field.hpp"
#include "cuechaos/stats.hpp"
#include "cuechaos/symbol_toeplitz.hpp"

namespace cuechaos {

/// E e^{beta X(theta)} for one field kind.
struct Normalizer {
  FieldKind kind = FieldKind::kFull;
  int n = 0;
  int m = 0;
  double beta = 0.0;
  double value = 1.0;
  double log_value = 0.0;
};

/// prod_{j=1}^{n} Gamma(j) Gamma(j + beta) / Gamma(j + beta/2)^2, in logs.
inline double log_product_formula_normalizer(int n, double beta) {
  if (n < 1 || beta < 0.0) throw InvalidArgument("product formula: need n >= 1, beta >= 0");
  double s = 0.0;
  for (int j = 1; j <= n; ++j)
    s += std::lgamma(j) + std::lgamma(j + beta) - 2.0 * std::lgamma(j + beta / 2.0);
  return s;
}

/// E e^{beta X_n(theta)} = D_{n-1}(|z - 1|^beta), cross-checked against the
/// product formula (ConsistencyAlarm beyond relative 1e-8).
inline Normalizer normalizer_exact(int n, double beta) {
  if (n < 1 || beta < 0.0) throw InvalidArgument("normalizer_exact: need n >= 1, beta >= 0");
  Normalizer z{FieldKind::kFull, n, 0, beta, 1.0, 0.0};
  if (beta == 0.0) return z;
  const auto fhat = fourier_coefficients(single_singularity_symbol(beta), n - 1);
  const auto det = toeplitz_det(fhat, n);
  if (det.degenerate) throw PrecisionFailure("normalizer_exact: degenerate determinant");
  const double check = log_product_formula_normalizer(n, beta);
  if (std::abs(std::expm1(det.log_abs - check)) > 1e-8)
    throw ConsistencyAlarm("normalizer_exact: determinant disagrees with product formula");
  z.log_value = det.log_abs;
  z.value = std::exp(det.log_abs);
  return z;
}

/// E e^{beta X_{n,m}(theta)} = D_{n-1}(e^V), V = -sum_{k<=m} (beta/2k)(z^k + z^{-k}).
inline Normalizer truncated_normalizer(int n, int m, double beta) {
  if (n < 1 || m < 1) throw InvalidArgument("truncated_normalizer: need n, m >= 1");
  Normalizer z{FieldKind::kTruncated, n, m, beta, 1.0, 0.0};
  if (beta == 0.0) return z;
  Symbol s;
  for (int k = 1; k <= m; ++k) {
    s.laurent[k] = -beta / (2.0 * k);
    s.laurent[-k] = -beta / (2.0 * k);
  }
  const auto det = toeplitz_det(fourier_coefficients(s, n - 1), n);
  if (det.degenerate) throw PrecisionFailure("truncated_normalizer: degenerate determinant");
  z.log_value = det.log_abs;
  z.value = std::exp(det.log_abs);
  return z;
}

/// E e^{beta X^{(M)}(theta)} = exp(beta^2 Sigma^{(M)}(0) / 2).
inline Normalizer gaussian_normalizer(int m, double beta) {
  const double lv = 0.5 * beta * beta * covariance_sigma(m, 0.0);
  return {FieldKind::kGaussian, 0, m, beta, std::exp(lv), lv};
}

/// Nonnegative test function on the grid: 1, 1 + cos(theta), or tabulated.
struct TestFunction {
  enum class Kind { kOne, kOnePlusCos, kGrid };
  Kind kind = Kind::kOne;
  std::vector<double> grid_values;

  static TestFunction one() { return {}; }
  static TestFunction one_plus_cos() { return {Kind::kOnePlusCos, {}}; }
  static TestFunction tabulated(std::vector<double> v) {
    for (double x : v)
      if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("TestFunction: values must be finite and >= 0");
    return {Kind::kGrid, std::move(v)};
  }

  std::string name() const {
    switch (kind) {
      case Kind::kOne: return "one";
      case Kind::kOnePlusCos: return "one_plus_cos";
      case Kind::kGrid: return "grid";
    }
    return "?";
  }

  /// Values on the grid theta_g = 2 pi g / grid_size.
  std::vector<double> on_grid(std::size_t grid_size) const {
    switch (kind) {
      case Kind::kOne: return std::vector<double>(grid_size, 1.0);
      case Kind::kOnePlusCos: {
        std::vector<double> v(grid_size);
        for (std::size_t g = 0; g < grid_size; ++g)
          v[g] = 1.0 + std::cos(2.0 * kPi * static_cast<double>(g) / static_cast<double>(grid_size));
        return v;
      }
      case Kind::kGrid:
        if (grid_values.size() != grid_size) throw InvalidArgument("TestFunction: tabulated size mismatch");
        return grid_values;
    }
    return {};
  }
};

struct MassSample {
  StreamKey key{};
  int n = 0;
  int m = 0;  // 0 for the full field
  double beta = 0.0;
  std::size_t grid_size = 0;
  double mass = 0.0;
  std::optional<double> g, e1, e2;
};

/// Density e^{beta X(theta_g)} / normalizer on the grid; -inf field values give 0.
inline std::vector<double> chaos_density(const FieldGrid& field, double beta, const Normalizer& z) {
  if (field.kind != z.kind) throw InvalidArgument("chaos measure: normalizer kind does not match field");
  if (z.beta != beta) throw InvalidArgument("chaos measure: normalizer beta does not match");
  if (field.kind != FieldKind::kGaussian && z.n != field.n)
    throw InvalidArgument("chaos measure: normalizer n does not match field");
  if (field.kind != FieldKind::kFull && z.m != field.m)
    throw InvalidArgument("chaos measure: normalizer m does not match field");
  std::vector<double> w(field.values.size());
  for (std::size_t g = 0; g < w.size(); ++g) {
    const double x = field.values[g];
    if (beta == 0.0)
      w[g] = 1.0;
    else
      w[g] = x == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(beta * x - z.log_value);
  }
  return w;
}

/// (1/G) sum_g phi(theta_g) e^{beta X(theta_g)} / normalizer.
inline MassSample mass_from_field(const FieldGrid& field, double beta, const Normalizer& z,
                                  const TestFunction& phi = TestFunction::one()) {
  const auto w = chaos_density(field, beta, z);
  const auto p = phi.on_grid(field.grid_size);
  std::vector<double> terms(w.size());
  for (std::size_t g = 0; g < w.size(); ++g) terms[g] = p[g] * w[g];
  MassSample s;
  s.key = field.key;
  s.n = field.n;
  s.m = field.kind == FieldKind::kFull ? 0 : field.m;
  s.beta = beta;
  s.grid_size = field.grid_size;
  s.mass = pairwise_sum(terms) / static_cast<double>(terms.size());
  return s;
}

/// Barrier decomposition of int phi d mu_{N,beta} for one draw:
///   E1 = int phi 1{barrier broken at some scale in [l, k_N]} d mu
///   G  = int phi 1{barrier held at all scales in [l, log2 M]} d mu^{(M)}
///   E2 = int phi 1{barrier held on [l, k_N]} d mu - G
/// with k_N = floor((1 - delta) log2 N). Only spec.gamma, spec.l and
/// spec.offsets are used; the top scales come from N, delta and M.
struct Decomposition {
  double total = 0.0;
  double g = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double reconstruction_error = 0.0;
};

struct DecompositionNormalizers {
  Normalizer full;
  Normalizer truncated;
};

inline DecompositionNormalizers decomposition_normalizers(int n, int m, double beta) {
  return {normalizer_exact(n, beta), truncated_normalizer(n, m, beta)};
}

inline Decomposition decompose_mass(CueSample& sample, double beta, const BarrierSpec& spec, double delta,
                                    int m, const TestFunction& phi, std::size_t grid_size,
                                    const DecompositionNormalizers& z) {
  if (spec.l < 0 || (1 << spec.l) > m) throw InvalidArgument("decompose_mass: need 2^l <= M");
  if (!std::isfinite(spec.gamma)) throw InvalidArgument("decompose_mass: gamma must be finite");
  const int k_n = dyadic_top(sample.n, delta);
  const int k_m = static_cast<int>(std::floor(std::log2(static_cast<double>(m)) + 1e-12));
  const int k_max = std::max(k_n, k_m);
  if (static_cast<std::size_t>(1) << k_max >= grid_size || static_cast<std::size_t>(m) >= grid_size)
    throw InvalidArgument("decompose_mass: grid too coarse for the scales");
  sample.ensure_traces(static_cast<std::size_t>(std::max(1 << k_max, m)));

  std::map<int, FieldGrid> scales;
  for (int k = spec.l; k <= k_max; ++k) scales[k] = field_on_grid(sample, grid_size, FieldMode::truncated(1 << k));
  const auto full = field_on_grid(sample, grid_size, FieldMode::full());
  const auto trunc = field_on_grid(sample, grid_size, FieldMode::truncated(m));
  const auto w_full = chaos_density(full, beta, z.full);
  const auto w_trunc = chaos_density(trunc, beta, z.truncated);
  const auto p = phi.on_grid(grid_size);

  auto held = [&](std::size_t g, int top) {
    for (int k = spec.l; k <= top; ++k)
      if (!(scales.at(k).values[g] <= spec.threshold(k))) return false;
    return true;
  };

  std::vector<double> total(grid_size), e1(grid_size), held_n(grid_size), gt(grid_size);
  for (std::size_t g = 0; g < grid_size; ++g) {
    const double a = p[g] * w_full[g];
    const bool bn = held(g, k_n);
    total[g] = a;
    e1[g] = bn ? 0.0 : a;
    held_n[g] = bn ? a : 0.0;
    gt[g] = held(g, k_m) ? p[g] * w_trunc[g] : 0.0;
  }
  const double inv = 1.0 / static_cast<double>(grid_size);
  Decomposition d;
  d.total = pairwise_sum(total) * inv;
  d.e1 = pairwise_sum(e1) * inv;
  d.g = pairwise_sum(gt) * inv;
  d.e2 = pairwise_sum(held_n) * inv - d.g;
  d.reconstruction_error = std::abs(d.total - (d.g + d.e1 + d.e2));
  return d;
}

/// Field values at a pair of angles plus the scale values entering the
/// barrier events there.
struct BiasedDraw {
  double x_theta = 0.0;
  double x_theta_prime = 0.0;
  std::map<int, double> scales_theta;
  std::map<int, double> scales_theta_prime;
};

/// Scale values X_{N,2^k} for k in [l, top] at both angles.
inline BiasedDraw biased_draw(CueSample& sample, double theta, double theta_prime, int l, int top) {
  if (l < 0 || top < l || top > 30) throw InvalidArgument("biased_draw: bad scale range");
  sample.ensure_traces(static_cast<std::size_t>(1) << top);
  BiasedDraw d;
  d.x_theta = sample.log_abs_char_poly(theta);
  d.x_theta_prime = sample.log_abs_char_poly(theta_prime);
  for (int k = l; k <= top; ++k) {
    d.scales_theta[k] = sample.truncated_field(1 << k, theta);
    d.scales_theta_prime[k] = sample.truncated_field(1 << k, theta_prime);
  }
  return d;
}

/// Same for the Gaussian reference field (x = X^{(M)}).
inline BiasedDraw biased_draw(const GaussianDraw& draw, double theta, double theta_prime, int l, int top) {
  if (l < 0 || top < l || (1 << top) > draw.m) throw InvalidArgument("biased_draw: bad scale range");
  BiasedDraw d;
  d.x_theta = gaussian_field_at(draw, draw.m, theta);
  d.x_theta_prime = gaussian_field_at(draw, draw.m, theta_prime);
  for (int k = l; k <= top; ++k) {
    d.scales_theta[k] = gaussian_field_at(draw, 1 << k, theta);
    d.scales_theta_prime[k] = gaussian_field_at(draw, 1 << k, theta_prime);
  }
  return d;
}

inline constexpr std::size_t kMinBiasedDraws = 1000;
inline constexpr double kMinEffectiveSampleSize = 30.0;

struct BiasedEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double effective_sample_size = 0.0;
  bool unreliable = false;
};

/// Self-normalized estimate of the probability of {barrier a at theta} and
/// {barrier b at theta'} under weights e^{beta (X(theta) + X(theta'))}.
inline BiasedEstimate biased_probability_mc(std::span<const BiasedDraw> draws, double beta,
                                            const BarrierSpec& a, const BarrierSpec& b) {
  if (draws.size() < kMinBiasedDraws) throw InvalidArgument("biased_probability_mc: need >= 1000 draws");
  std::vector<double> logw(draws.size()), hit(draws.size());
  double top = -INFINITY;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    logw[i] = beta * (draws[i].x_theta + draws[i].x_theta_prime);
    top = std::max(top, logw[i]);
    hit[i] = barrier_indicator(draws[i].scales_theta, a) && barrier_indicator(draws[i].scales_theta_prime, b)
                 ? 1.0
                 : 0.0;
  }
  std::vector<double> w(draws.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(logw[i] - top);
  const auto r = jackknife_ratio(w, hit);
  return {r.value, r.std_error, r.effective_sample_size, r.effective_sample_size < kMinEffectiveSampleSize};
}

}  // namespace cuechaos
