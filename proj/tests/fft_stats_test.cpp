#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "cuechaos/fft.hpp"
#include "cuechaos/rng.hpp"
#include "cuechaos/stats.hpp"

using namespace cuechaos;
using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

namespace {
std::vector<cd> naive_dft(const std::vector<cd>& in, double sign) {
  const std::size_t n = in.size();
  std::vector<cd> out(n);
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t m = 0; m < n; ++m) out[g] += in[m] * std::polar(1.0, sign * 2.0 * kPi * m * g / n);
  return out;
}

std::vector<cd> random_vector(std::size_t n, std::uint64_t stream) {
  RngStream r(11, stream);
  std::vector<cd> v(n);
  for (auto& x : v) x = r.complex_normal();
  return v;
}
}  // namespace

TEST(Fft, MatchesNaiveTransformBothSigns) {
  const auto v = random_vector(32, 0);
  const auto neg = dft(v, FftSign::kNegative);
  const auto pos = dft(v, FftSign::kPositive);
  const auto neg_ref = naive_dft(v, -1.0);
  const auto pos_ref = naive_dft(v, 1.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_NEAR(std::abs(neg[i] - neg_ref[i]), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(pos[i] - pos_ref[i]), 0.0, 1e-12);
  }
}

TEST(Fft, RejectsNonPowerOfTwo) {
  std::vector<cd> v(12);
  EXPECT_THROW(dft(v, FftSign::kNegative), InvalidArgument);
}

TEST(Fft, PolynomialOnRootsOfUnityMatchesHorner) {
  const auto c = random_vector(9, 1);
  const auto vals = eval_on_roots_of_unity(c, 16);
  for (std::size_t g = 0; g < 16; ++g) {
    const cd z = std::polar(1.0, 2.0 * kPi * g / 16.0);
    cd h = 0.0;
    for (std::size_t m = c.size(); m-- > 0;) h = h * z + c[m];
    EXPECT_NEAR(std::abs(vals[g] - h), 0.0, 1e-12);
  }
}

TEST(Fft, FourierFromSamplesRecoversTrigPolynomial) {
  const std::size_t n = 64;
  std::vector<cd> s(n);
  for (std::size_t g = 0; g < n; ++g) {
    const double th = 2.0 * kPi * g / n;
    s[g] = cd(3.0, 0.0) + cd(0.5, -1.0) * std::polar(1.0, 2.0 * th) + cd(0.25, 0.0) * std::polar(1.0, -5.0 * th);
  }
  const auto c = fourier_from_samples(s, 8);
  EXPECT_NEAR(std::abs(c[8] - cd(3.0, 0.0)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(c[10] - cd(0.5, -1.0)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(c[3] - cd(0.25, 0.0)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(c[9]), 0.0, 1e-13);
}

TEST(Fft, ConvolutionMatchesNaive) {
  const auto a = random_vector(7, 2);
  const auto b = random_vector(12, 3);
  const auto c = convolve(a, b);
  ASSERT_EQ(c.size(), 18u);
  for (std::size_t k = 0; k < c.size(); ++k) {
    cd ref = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (k >= i && k - i < b.size()) ref += a[i] * b[k - i];
    EXPECT_NEAR(std::abs(c[k] - ref), 0.0, 1e-12);
  }
}

TEST(Stats, PairwiseSumIsExactOnIntegers) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  EXPECT_EQ(pairwise_sum(v), 499500.0);
}

TEST(Stats, EstimateMeanKnownValues) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto m = estimate_mean(v);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.std_error, std::sqrt((5.0 / 3.0) / 4.0), 1e-15);
  EXPECT_THROW(estimate_mean(std::vector<double>{1.0}), InvalidArgument);
}

TEST(Stats, JackknifeWithEqualWeightsIsPlainMean) {
  RngStream r(12, 0);
  std::vector<double> w(500, 2.0), h(500);
  for (auto& x : h) x = r.uniform() < 0.3 ? 1.0 : 0.0;
  const auto est = jackknife_ratio(w, h);
  const auto m = estimate_mean(h);
  EXPECT_NEAR(est.value, m.mean, 1e-14);
  EXPECT_NEAR(est.std_error, m.std_error, 1e-12);
  EXPECT_NEAR(est.effective_sample_size, 500.0, 1e-9);
}

TEST(Stats, KolmogorovSurvivalReferenceValues) {
  EXPECT_NEAR(kolmogorov_survival(0.5), 0.9639452436648751, 1e-9);
  EXPECT_NEAR(kolmogorov_survival(1.0), 0.2699996716773546, 1e-9);
  EXPECT_NEAR(kolmogorov_survival(1.36), 0.04946, 1e-4);
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
  // Both series agree at the switch point.
  EXPECT_NEAR(kolmogorov_survival(1.18 - 1e-12), kolmogorov_survival(1.18), 1e-9);
}

TEST(Stats, KsAgainstOwnEmpiricalCdf) {
  RngStream r(13, 0);
  std::vector<double> v(200);
  for (auto& x : v) x = r.normal();
  const EmpiricalLaw law(v, "self");
  const auto ks = ks_test(law, [&](double x) { return law.cdf(x); });
  EXPECT_LE(ks.statistic, 1.0 / 200.0 + 1e-15);
  EXPECT_NEAR(ks_test(law, law).statistic, 0.0, 1e-15);
}

TEST(Stats, KsRejectsUndersizedSample) {
  const EmpiricalLaw law(std::vector<double>(49, 1.0), "small");
  EXPECT_THROW(ks_test(law, [](double) { return 0.5; }), InvalidArgument);
}

TEST(Stats, EmpiricalLawRejectsNonFinite) {
  EXPECT_THROW(EmpiricalLaw({1.0, NAN}, "bad"), InvalidArgument);
}

TEST(Stats, KsNullCalibrationExponential) {
  int accepted = 0;
  for (int rep = 0; rep < 100; ++rep) {
    RngStream r(14, static_cast<std::uint64_t>(rep));
    std::vector<double> v(10000);
    for (auto& x : v) x = r.exponential();
    const auto ks = ks_test(EmpiricalLaw(v, "exp"), [](double x) { return -std::expm1(-x); });
    if (ks.p_value > 0.01) ++accepted;
  }
  EXPECT_GE(accepted, 95);
}

TEST(Stats, TwoSampleKsDetectsShift) {
  RngStream r(15, 0);
  std::vector<double> a(2000), b(2000);
  for (auto& x : a) x = r.normal();
  for (auto& x : b) x = r.normal() + 0.3;
  EXPECT_LT(ks_test(EmpiricalLaw(a, "a"), EmpiricalLaw(b, "b")).p_value, 1e-6);
}

TEST(Stats, ScalingRegressionExactPowerLaw) {
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 9; ++i) {
    const double x = 0.01 * std::pow(10.0, i / 4.0);
    pts.emplace_back(x, 3.0 / x);
  }
  const auto fit = scaling_regression(pts);
  EXPECT_NEAR(fit.slope, -1.0, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-12);
}

TEST(Stats, ScalingRegressionConstantData) {
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 6; ++i) pts.emplace_back(std::pow(2.0, i), 5.0);
  EXPECT_NEAR(scaling_regression(pts).slope, 0.0, 1e-14);
}

TEST(Stats, ScalingRegressionRejectsDegenerateInput) {
  std::vector<std::pair<double, double>> narrow;
  for (int i = 0; i < 6; ++i) narrow.emplace_back(1.0 + 0.1 * i, 1.0);
  EXPECT_THROW(scaling_regression(narrow), InvalidArgument);
  std::vector<std::pair<double, double>> few{{1, 1}, {10, 1}, {100, 1}, {1000, 1}};
  EXPECT_THROW(scaling_regression(few), InvalidArgument);
  std::vector<std::pair<double, double>> neg{{1, 1}, {10, -1}, {100, 1}, {1000, 1}, {1e4, 1}};
  EXPECT_THROW(scaling_regression(neg), InvalidArgument);
  // A span of 8 passes when the caller lowers the requirement.
  std::vector<std::pair<double, double>> eight;
  for (int i = 0; i < 5; ++i) eight.emplace_back(std::pow(2.0, i * 0.75), 1.0);
  EXPECT_THROW(scaling_regression(eight), InvalidArgument);
  EXPECT_NO_THROW(scaling_regression(eight, 8.0));
}
