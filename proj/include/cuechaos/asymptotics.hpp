#pragma once

// Closed-form large-N predictions for exponential moments of the CUE
// log-characteristic polynomial, the total-mass law of the limiting chaos,
// and the log-sum comparison. Every prediction is an exact finite sum.

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cuechaos/errors.hpp"
#include "cuechaos/rng.hpp"
#include "cuechaos/symbol_toeplitz.hpp"

namespace cuechaos {

/// Parameters of the biased exponential moment
///   E exp(b1 X_N(th) + b2 X_N(th') + a1 X_{N,K1}(th) + a2 X_{N,K2}(th) + Tr T(U))
/// divided by E exp(b1 X_N(th) + b2 X_N(th')).
using TestimateParams = SymbolParams;

inline void validate_testimate(const TestimateParams& p) {
  if (p.k1 < 1 || p.k2 < p.k1) throw InvalidArgument("testimate: need 1 <= k1 <= k2");
  if (p.beta1 < 0.0 || p.beta2 < 0.0) throw InvalidArgument("testimate: exponents must be >= 0");
  for (const auto& [k, v] : p.t_coeffs) {
    if (k == 0) throw InvalidArgument("testimate: T has no constant term");
    const auto it = p.t_coeffs.find(-k);
    const cplx partner = it == p.t_coeffs.end() ? cplx{0.0} : it->second;
    if (std::abs(partner - std::conj(v)) > 1e-12 * (1.0 + std::abs(v)))
      throw InvalidArgument("testimate: T must be real-valued");
  }
}

inline double harmonic(int k) {
  double s = 0.0;
  for (int j = k; j >= 1; --j) s += 1.0 / j;
  return s;
}

/// sum_{j<=k} cos(j delta) / j.
inline double cosine_sum(int k, double delta) {
  double s = 0.0;
  for (int j = k; j >= 1; --j) s += std::cos(j * delta) / j;
  return s;
}

/// Exponent of the predicted ratio. The a2*b2 cosine sum runs to K2 (the
/// choice under which the two-point corollary is recovered exactly).
inline double testimate_exponent(const TestimateParams& p) {
  validate_testimate(p);
  const double a1 = p.alpha1, a2 = p.alpha2, b1 = p.beta1, b2 = p.beta2;
  const double delta = p.theta - p.theta_prime;
  double e = (a1 * a1 + 2.0 * a1 * a2 + 2.0 * a1 * b1) / 4.0 * harmonic(p.k1) +
             (a2 * a2 + 2.0 * a2 * b1) / 4.0 * harmonic(p.k2) + a1 * b2 / 2.0 * cosine_sum(p.k1, delta) +
             a2 * b2 / 2.0 * cosine_sum(p.k2, delta);
  auto coeff = [&](int k) {
    const auto it = p.t_coeffs.find(k);
    return it == p.t_coeffs.end() ? cplx{0.0} : it->second;
  };
  int m = 0;
  for (const auto& [k, v] : p.t_coeffs) m = std::max(m, std::abs(k));
  cplx t = 0.0;
  for (int k = 1; k <= m; ++k) {
    const cplx tk = coeff(k), tmk = coeff(-k);
    t += static_cast<double>(k) * tk * tmk;
    const cplx pair = tk * std::polar(1.0, k * p.theta) + tmk * std::polar(1.0, -k * p.theta);
    if (k <= p.k1) t -= a1 / 2.0 * pair;
    if (k <= p.k2) t -= a2 / 2.0 * pair;
    t -= b1 / 2.0 * pair;
    t -= b2 / 2.0 * (tk * std::polar(1.0, k * p.theta_prime) + tmk * std::polar(1.0, -k * p.theta_prime));
  }
  return e + t.real();
}

inline double predict_testimate(const TestimateParams& p) { return std::exp(testimate_exponent(p)); }

enum class CorollaryMode { kOnePoint, kTwoPointMixed, kTwoPointFull };

struct CorollaryParams {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta = 0.0;
  int k1 = 1;
  int k2 = 1;
  int m = 1;  // truncation of the second field (mixed mode)
  double theta = 0.0;
  double theta_prime = 0.0;
};

/// One point: exp((a^2/2 + a b)(1/2) H_K) with a = alpha1, K = k1.
/// Mixed: second point carries the truncated field X_{N,M}(th').
/// Full: both points carry X_N.
inline double predict_corollary(CorollaryMode mode, const CorollaryParams& p) {
  const double a1 = p.alpha1, a2 = p.alpha2, b = p.beta;
  const double delta = p.theta - p.theta_prime;
  switch (mode) {
    case CorollaryMode::kOnePoint:
      if (p.k1 < 1) throw InvalidArgument("predict_corollary: K must be >= 1");
      return std::exp((a1 * a1 / 2.0 + a1 * b) * 0.5 * harmonic(p.k1));
    case CorollaryMode::kTwoPointMixed: {
      if (p.k1 < 1 || p.k2 < p.k1 || p.m < 1) throw InvalidArgument("predict_corollary: bad truncations");
      const double e = harmonic(p.k1) * (a1 * a1 / 4.0 + a1 * b / 2.0 + a1 * a2 / 2.0) +
                       harmonic(p.k2) * (a2 * a2 / 4.0 + a2 * b / 2.0) +
                       a1 * b / 2.0 * cosine_sum(std::min(p.k1, p.m), delta) +
                       a2 * b / 2.0 * cosine_sum(std::min(p.k2, p.m), delta);
      return std::exp(e);
    }
    case CorollaryMode::kTwoPointFull: {
      if (p.k1 < 1 || p.k2 < p.k1) throw InvalidArgument("predict_corollary: need 1 <= k1 <= k2");
      double e = 0.0;
      for (int j = p.k1; j >= 1; --j)
        e += (a1 * a1 / 4.0 + a1 * b / 2.0 * (std::cos(j * delta) + 1.0) + a1 * a2 / 2.0) / j;
      for (int j = p.k2; j >= 1; --j) e += (a2 * a2 / 4.0 + a2 * b / 2.0 * (std::cos(j * delta) + 1.0)) / j;
      return std::exp(e);
    }
  }
  throw InvalidArgument("predict_corollary: unknown mode");
}

/// T_k for the mixed two-point mode: beta X_{N,M}(th') = Tr T(U) with
/// T_k = -beta e^{-ik th'} / (2k), T_{-k} = conj(T_k).
inline std::map<int, cplx> truncated_field_laurent(double beta, int m, double theta_prime) {
  std::map<int, cplx> pos;
  for (int k = 1; k <= m; ++k) pos[k] = -beta / (2.0 * k) * std::polar(1.0, -k * theta_prime);
  return real_laurent_family(pos);
}

/// Limit of the biased Laplace transform of (Tr U^j / sqrt j)_{j<=L}.
inline cplx widom_limit(std::span<const double> s, std::span<const double> t, double theta,
                        double theta_prime, double beta) {
  if (s.size() != t.size()) throw InvalidArgument("widom_limit: s and t must have equal length");
  if (circle_distance(theta, theta_prime) == 0.0) throw InvalidArgument("widom_limit: need theta != theta'");
  cplx e = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double j = static_cast<double>(i + 1);
    const cplx w(s[i], t[i]);
    const cplx phases = std::polar(1.0, j * theta) + std::polar(1.0, j * theta_prime);
    e += -beta / 2.0 * (w / std::sqrt(j) * phases + std::conj(w) / std::sqrt(j) * std::conj(phases));
    e += s[i] * s[i] + t[i] * t[i];
  }
  return std::exp(e);
}

/// Two-point decorrelation limit: |e^{i th} - e^{i th'}|^{-b1 b2 / 2}, or with
/// a truncation M, exp((b1 b2 / 2) sum_{j<=M} cos(j (th - th')) / j).
inline double dik_limit(double beta1, double beta2, double theta, double theta_prime,
                        std::optional<int> m = std::nullopt) {
  if (beta1 < 0.0 || beta2 < 0.0) throw InvalidArgument("dik_limit: exponents must be >= 0");
  const double prod = beta1 * beta2;
  if (m) {
    if (*m < 1) throw InvalidArgument("dik_limit: truncation must be >= 1");
    return std::exp(prod / 2.0 * cosine_sum(*m, theta - theta_prime));
  }
  if (prod == 0.0) return 1.0;
  const double d = circle_distance(theta, theta_prime);
  if (d == 0.0) throw InvalidArgument("dik_limit: full mode needs theta != theta'");
  return std::pow(2.0 * std::sin(d / 2.0), -prod / 2.0);
}

struct LogSum {
  double sum = 0.0;
  double remainder = 0.0;
};

/// sum_{j<=m} cos(j delta)/j and its deviation from min(log+ (1/d), log m).
inline LogSum logsum(int m, double delta) {
  if (m < 1) throw InvalidArgument("logsum: m must be >= 1");
  const double d = circle_distance(delta, 0.0);
  const double log_m = std::log(static_cast<double>(m));
  const double main = d == 0.0 ? log_m : std::min(std::max(0.0, -std::log(d)), log_m);
  LogSum out;
  out.sum = cosine_sum(m, delta);
  out.remainder = out.sum - main;
  return out;
}

/// Slope of log E e^{b X_N(th) + b X_N(th')} against log d in the
/// mesoscopic range.
inline double ck_target_slope(double beta) { return -beta * beta / 2.0; }

inline void validate_fb_beta(double beta) {
  if (!(beta > 0.0 && beta < 2.0)) throw InvalidArgument("fyodorov-bouchaud law: beta must lie in (0, 2)");
}

/// P(W <= w) for W = Y^{-a} / Gamma(1 - a), Y ~ Exp(1), a = beta^2 / 4.
inline double fb_cdf(double beta, double w) {
  validate_fb_beta(beta);
  if (w <= 0.0) return 0.0;
  const double a = beta * beta / 4.0;
  return std::exp(-std::pow(std::tgamma(1.0 - a) * w, -1.0 / a));
}

inline double fb_sample(double beta, RngStream& stream) {
  validate_fb_beta(beta);
  const double a = beta * beta / 4.0;
  return std::pow(stream.exponential(), -a) / std::tgamma(1.0 - a);
}

}  // namespace cuechaos
