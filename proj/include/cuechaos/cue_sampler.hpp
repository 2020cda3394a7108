#pragma once

// Haar-unitary spectra without dense eigensolvers.
//
// A CUE(n) spectrum is generated from n independent Verblunsky coefficients
// (Killip-Nenciu): alpha_k rotationally invariant with |alpha_k|^2 ~
// Beta(1, n-k-1) for k < n-1, alpha_{n-1} uniform on the circle. The Szego
// recursion then yields the characteristic polynomial det(z - U) directly,
// and Newton's identities turn its coefficients into power sums Tr U^k.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "cuechaos/errors.hpp"
#include "cuechaos/fft.hpp"
#include "cuechaos/rng.hpp"

namespace cuechaos {

using cplx = std::complex<double>;

/// Power sums Tr U^k for k = 1..values.size(), with the instability
/// sentinel of the Newton recursion.
struct TraceVector {
  std::vector<cplx> values;
  double growth = 0.0;  // largest intermediate term / largest coefficient
  bool unstable = false;
};

inline constexpr double kNewtonGrowthLimit = 1e12;

/// Monic characteristic polynomial of the CMV matrix with the given
/// Verblunsky coefficients, ascending order (secular[n] == 1).
inline std::vector<cplx> secular_coefficients(std::span<const cplx> alphas) {
  const std::size_t n = alphas.size();
  if (n == 0) throw InvalidArgument("secular_coefficients: empty coefficient list");
  for (std::size_t k = 0; k + 1 < n; ++k)
    if (!(std::abs(alphas[k]) < 1.0))
      throw InvalidArgument("secular_coefficients: interior coefficient outside the open disk");
  if (std::abs(std::abs(alphas[n - 1]) - 1.0) > 1e-12)
    throw InvalidArgument("secular_coefficients: last coefficient must be unimodular");

  // phi holds Phi_k, rev holds Phi_k^*(z) = z^k conj(Phi_k(1/conj z)).
  std::vector<cplx> phi{1.0}, rev{1.0};
  phi.reserve(n + 1);
  rev.reserve(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx a = alphas[k];
    const cplx ca = std::conj(a);
    std::vector<cplx> next(k + 2), next_rev(k + 2);
    // Phi_{k+1} = z Phi_k - conj(a) Phi_k^*;  Phi_{k+1}^* = Phi_k^* - a z Phi_k.
    for (std::size_t m = 0; m <= k; ++m) {
      next[m + 1] += phi[m];
      next[m] -= ca * rev[m];
      next_rev[m] += rev[m];
      next_rev[m + 1] -= a * phi[m];
    }
    phi = std::move(next);
    rev = std::move(next_rev);
  }
  phi[n] = 1.0;
  return phi;
}

/// Power sums of the roots of the monic polynomial `secular` (ascending
/// order) via Newton's identities. For k_max > degree the full linear
/// recursion is continued; precision degrades slowly with k in that regime.
inline TraceVector traces_from_secular(std::span<const cplx> secular, std::size_t k_max) {
  if (secular.size() < 2) throw InvalidArgument("traces_from_secular: degree must be >= 1");
  if (k_max == 0) throw InvalidArgument("traces_from_secular: k_max must be positive");
  const std::size_t n = secular.size() - 1;
  if (std::abs(secular[n] - 1.0) > 1e-12)
    throw InvalidArgument("traces_from_secular: polynomial must be monic");
  // a[i] = coefficient of z^{n-i}, so Phi(z) = sum_i a[i] z^{n-i}, a[0] = 1.
  std::vector<cplx> a(n + 1);
  double input_scale = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    a[i] = secular[n - i];
    input_scale = std::max(input_scale, std::abs(a[i]));
  }

  TraceVector out;
  out.values.resize(k_max);
  double max_term = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    cplx s = 0.0;
    const std::size_t top = std::min(k - 1, n);
    for (std::size_t i = 1; i <= top; ++i) {
      const cplx term = a[i] * out.values[k - i - 1];
      max_term = std::max(max_term, std::abs(term));
      s += term;
    }
    if (k <= n) {
      const cplx term = static_cast<double>(k) * a[k];
      max_term = std::max(max_term, std::abs(term));
      s += term;
    }
    out.values[k - 1] = -s;
  }
  out.growth = max_term / input_scale;
  out.unstable = out.growth > kNewtonGrowthLimit;
  return out;
}

/// One CUE draw. `traces[k-1]` holds Tr U^k.
struct CueSample {
  int n = 0;
  std::vector<cplx> alphas;
  std::vector<cplx> secular;
  std::vector<cplx> traces;
  bool traces_unstable = false;
  StreamKey key{};

  /// Tr U^k for any integer k (Tr U^0 = n, Tr U^{-k} = conj Tr U^k).
  cplx trace(int k) const {
    if (k == 0) return static_cast<double>(n);
    const std::size_t idx = static_cast<std::size_t>(std::abs(k)) - 1;
    if (idx >= traces.size()) throw InvalidArgument("CueSample::trace: trace not materialized");
    return k > 0 ? traces[idx] : std::conj(traces[idx]);
  }

  /// Extends the materialized traces to at least k_max.
  void ensure_traces(std::size_t k_max) {
    if (traces.size() >= k_max) return;
    if (secular.empty()) secular = secular_coefficients(alphas);
    auto tv = traces_from_secular(secular, k_max);
    traces = std::move(tv.values);
    traces_unstable = tv.unstable;
  }

  /// Phi_n(z) = det(z - U) by Horner's rule.
  cplx char_poly(cplx z) const {
    cplx acc = 0.0;
    for (std::size_t m = secular.size(); m-- > 0;) acc = acc * z + secular[m];
    return acc;
  }

  /// X_n(theta) = log|det(U - e^{i theta})|.
  double log_abs_char_poly(double theta) const {
    return std::log(std::abs(char_poly(std::polar(1.0, theta))));
  }

  /// X_{n,m}(theta) = -sum_{k<=m} Re(e^{-ik theta} Tr U^k) / k.
  double truncated_field(int m, double theta) const {
    double s = 0.0;
    for (int k = 1; k <= m; ++k)
      s += std::real(std::polar(1.0, -k * theta) * trace(k)) / k;
    return -s;
  }
};

/// Draws the Verblunsky coefficients of a CUE(n) matrix; `secular` and
/// `traces` are left empty.
inline CueSample sample_verblunsky(int n, RngStream& stream) {
  if (n < 1) throw InvalidArgument("sample_verblunsky: n must be >= 1");
  CueSample s;
  s.n = n;
  s.key = stream.key();
  s.alphas.resize(static_cast<std::size_t>(n));
  for (int k = 0; k + 1 < n; ++k) {
    const double shape = static_cast<double>(n - k - 1);
    // Inverse CDF of Beta(1, shape): r = 1 - (1-U)^{1/shape}.
    const double u = stream.uniform();
    const double r2 = -std::expm1(std::log1p(-u) / shape);
    s.alphas[static_cast<std::size_t>(k)] = std::sqrt(r2) * stream.unit_phase();
  }
  s.alphas[static_cast<std::size_t>(n - 1)] = stream.unit_phase();
  return s;
}

/// Full draw: Verblunsky coefficients, secular polynomial and traces up to
/// k_max (0 means none).
inline CueSample sample_cue(int n, RngStream& stream, std::size_t k_max = 0) {
  CueSample s = sample_verblunsky(n, stream);
  s.secular = secular_coefficients(s.alphas);
  if (k_max > 0) s.ensure_traces(k_max);
  return s;
}

/// Haar unitary by QR of a complex Ginibre matrix with the phase fix
/// U = Q diag(R_ii / |R_ii|). Dense cross-check backend.
inline Eigen::MatrixXcd sample_haar_qr(int n, RngStream& stream) {
  if (n < 1) throw InvalidArgument("sample_haar_qr: n must be >= 1");
  Eigen::MatrixXcd z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = stream.complex_normal();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

/// max |(U*U - I)_{ij}|.
inline double unitarity_defect(const Eigen::MatrixXcd& u) {
  const Eigen::MatrixXcd d = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

/// Tr U^k, k = 1..k_max, by repeated multiplication.
inline std::vector<cplx> dense_traces(const Eigen::MatrixXcd& u, std::size_t k_max) {
  std::vector<cplx> out(k_max);
  Eigen::MatrixXcd p = u;
  for (std::size_t k = 0; k < k_max; ++k) {
    out[k] = p.trace();
    if (k + 1 < k_max) p = p * u;
  }
  return out;
}

/// log|det(U - e^{i theta})|.
inline double dense_log_abs_char_poly(const Eigen::MatrixXcd& u, double theta) {
  const Eigen::MatrixXcd a =
      u - std::polar(1.0, theta) * Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return std::log(std::abs(a.partialPivLu().determinant()));
}

enum class FieldKind { kFull, kTruncated, kGaussian };

/// Field values on the grid theta_g = 2 pi g / grid_size.
struct FieldGrid {
  std::size_t grid_size = 0;
  std::vector<double> values;
  FieldKind kind = FieldKind::kFull;
  int n = 0;  // matrix size (0 for Gaussian fields)
  int m = 0;  // truncation level (0 for full fields)
  StreamKey key{};

  double angle(std::size_t g) const {
    return 2.0 * std::numbers::pi * static_cast<double>(g) / static_cast<double>(grid_size);
  }

  /// Grid mean over finite values.
  double mean() const {
    double s = 0.0;
    std::size_t c = 0;
    for (double v : values)
      if (std::isfinite(v)) {
        s += v;
        ++c;
      }
    return c ? s / static_cast<double>(c) : 0.0;
  }
};

struct FieldMode {
  FieldKind kind = FieldKind::kFull;
  int m = 0;
  static FieldMode full() { return {FieldKind::kFull, 0}; }
  static FieldMode truncated(int m) { return {FieldKind::kTruncated, m}; }
};

/// Real trigonometric sum sum_{k=1}^{m} Re(c_k e^{-ik theta_g}) on the grid,
/// with c_k = coeff(k). Requires m < grid_size.
template <typename CoeffFn>
std::vector<double> real_trig_sum_on_grid(int m, std::size_t grid_size, CoeffFn coeff) {
  std::vector<cplx> b(grid_size);
  for (int k = 1; k <= m; ++k) b[static_cast<std::size_t>(k)] = coeff(k);
  const auto raw = dft(b, FftSign::kNegative);
  std::vector<double> out(grid_size);
  for (std::size_t g = 0; g < grid_size; ++g) out[g] = raw[g].real();
  return out;
}

/// X_N (full) or X_{N,M} (truncated) on a power-of-two grid. Full mode
/// evaluates log|Phi_N| at the grid roots of unity with one transform and
/// needs grid_size > n; an exact zero maps to -infinity.
inline FieldGrid field_on_grid(const CueSample& sample, std::size_t grid_size, FieldMode mode) {
  if (!is_power_of_two(grid_size)) throw InvalidArgument("field_on_grid: grid size must be 2^k");
  FieldGrid f;
  f.grid_size = grid_size;
  f.kind = mode.kind;
  f.n = sample.n;
  f.key = sample.key;
  if (mode.kind == FieldKind::kFull) {
    if (grid_size <= static_cast<std::size_t>(sample.n))
      throw InvalidArgument("field_on_grid: full mode needs grid_size > n");
    if (sample.secular.empty()) throw InvalidArgument("field_on_grid: secular polynomial missing");
    const auto vals = eval_on_roots_of_unity(sample.secular, grid_size);
    f.values.resize(grid_size);
    for (std::size_t g = 0; g < grid_size; ++g) {
      const double a = std::abs(vals[g]);
      f.values[g] = a > 0.0 ? std::log(a) : -std::numeric_limits<double>::infinity();
    }
  } else if (mode.kind == FieldKind::kTruncated) {
    if (mode.m < 1) throw InvalidArgument("field_on_grid: truncation level must be >= 1");
    if (static_cast<std::size_t>(mode.m) >= grid_size)
      throw InvalidArgument("field_on_grid: truncation level must be below grid size");
    if (sample.traces.size() < static_cast<std::size_t>(mode.m))
      throw InvalidArgument("field_on_grid: traces up to M are not materialized");
    f.m = mode.m;
    f.values = real_trig_sum_on_grid(mode.m, grid_size, [&](int k) { return sample.trace(k) / double(k); });
    for (auto& v : f.values) v = -v;
  } else {
    throw InvalidArgument("field_on_grid: Gaussian fields come from sample_gaussian_field");
  }
  return f;
}

}  // namespace cuechaos
