#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cuechaos/errors.hpp"

namespace cuechaos {

/// Sum in a fixed binary tree, so the result depends only on the order of
/// the inputs (not on how they were produced).
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;

  /// |mean - target| measured in standard errors.
  double z_score(double target) const {
    if (std_error == 0.0) return mean == target ? 0.0 : INFINITY;
    return std::abs(mean - target) / std_error;
  }
};

inline MeanEstimate estimate_mean(std::span<const double> v) {
  if (v.size() < 2) throw InvalidArgument("estimate_mean: need at least two values");
  const double n = static_cast<double>(v.size());
  const double mean = pairwise_sum(v) / n;
  std::vector<double> sq(v.size());
  std::transform(v.begin(), v.end(), sq.begin(), [&](double x) { return (x - mean) * (x - mean); });
  const double var = pairwise_sum(sq) / (n - 1.0);
  return {mean, std::sqrt(var / n), v.size()};
}

/// Self-normalized ratio sum(w * h) / sum(w) with its leave-one-out
/// jackknife standard error.
struct RatioEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double effective_sample_size = 0.0;
};

inline RatioEstimate jackknife_ratio(std::span<const double> weights,
                                     std::span<const double> values) {
  if (weights.size() != values.size() || weights.size() < 2)
    throw InvalidArgument("jackknife_ratio: need matching inputs of size >= 2");
  const std::size_t n = weights.size();
  std::vector<double> wh(n), w2(n);
  for (std::size_t i = 0; i < n; ++i) {
    wh[i] = weights[i] * values[i];
    w2[i] = weights[i] * weights[i];
  }
  const double sw = pairwise_sum(weights);
  const double swh = pairwise_sum(wh);
  const double sw2 = pairwise_sum(w2);
  RatioEstimate out;
  out.value = swh / sw;
  out.effective_sample_size = sw * sw / sw2;
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = sw - weights[i];
    loo[i] = d > 0.0 ? (swh - wh[i]) / d : out.value;
  }
  const double nn = static_cast<double>(n);
  const double loo_mean = pairwise_sum(loo) / nn;
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = (loo[i] - loo_mean) * (loo[i] - loo_mean);
  out.std_error = std::sqrt((nn - 1.0) / nn * pairwise_sum(dev));
  return out;
}

/// Sorted, finite sample with provenance.
class EmpiricalLaw {
 public:
  EmpiricalLaw() = default;
  EmpiricalLaw(std::vector<double> values, std::string source)
      : values_(std::move(values)), source_(std::move(source)) {
    for (double x : values_)
      if (!std::isfinite(x)) throw InvalidArgument("EmpiricalLaw: non-finite value in " + source_);
    std::sort(values_.begin(), values_.end());
  }

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const std::string& source() const { return source_; }

  /// Right-continuous empirical CDF.
  double cdf(double x) const {
    const auto it = std::upper_bound(values_.begin(), values_.end(), x);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
  }

 private:
  std::vector<double> values_;
  std::string source_;
};

/// Kolmogorov survival function Q(lambda) = P(K > lambda).
inline double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (lambda < 1.18) {
    // Dual (Jacobi theta) form converges fast for small lambda.
    const double y = std::exp(-pi * pi / (8.0 * lambda * lambda));
    double s = 0.0;
    for (int j = 1; j <= 7; ++j) s += std::pow(y, (2 * j - 1) * (2 * j - 1));
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    s += (j % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

inline constexpr std::size_t kMinKsSampleSize = 50;

inline double ks_p_value(double statistic, double effective_n) {
  const double rn = std::sqrt(effective_n);
  return kolmogorov_survival((rn + 0.12 + 0.11 / rn) * statistic);
}

/// One-sample KS test against a continuous CDF.
inline KsResult ks_test(const EmpiricalLaw& sample, const std::function<double(double)>& cdf) {
  if (sample.size() < kMinKsSampleSize) throw InvalidArgument("ks_test: sample too small");
  const auto v = sample.values();
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, ks_p_value(d, n)};
}

/// Two-sample KS test.
inline KsResult ks_test(const EmpiricalLaw& a, const EmpiricalLaw& b) {
  if (a.size() < kMinKsSampleSize || b.size() < kMinKsSampleSize)
    throw InvalidArgument("ks_test: sample too small");
  const auto x = a.values();
  const auto y = b.values();
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_p_value(d, na * nb / (na + nb))};
}

struct SlopeEstimate {
  double slope = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
};

/// Least-squares slope of log(y) against log(x). Requires at least five
/// positive points and max(x)/min(x) >= min_span.
inline SlopeEstimate scaling_regression(std::span<const std::pair<double, double>> points,
                                        double min_span = 10.0) {
  if (points.size() < 5) throw InvalidArgument("scaling_regression: need at least 5 points");
  std::vector<double> lx, ly;
  double xmin = INFINITY, xmax = 0.0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw InvalidArgument("scaling_regression: non-positive point");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
  }
  if (xmax / xmin < min_span * (1.0 - 1e-12))
    throw InvalidArgument("scaling_regression: degenerate x-range");
  const double n = static_cast<double>(lx.size());
  const double mx = pairwise_sum(lx) / n;
  const double my = pairwise_sum(ly) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  SlopeEstimate out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - out.intercept - out.slope * lx[i];
    rss += r * r;
  }
  out.std_error = std::sqrt(rss / (n - 2.0) / sxx);
  return out;
}

}  // namespace cuechaos
