#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "cuechaos/stats.hpp"
#include "cuechaos/symbol_toeplitz.hpp"

using namespace cuechaos;

namespace {

// (1/2pi) int_{-pi}^{pi} f(theta) e^{-ij theta} d theta, split at the singular points.
cplx quadrature_coefficient(const Symbol& s, int j) {
  std::vector<double> cuts{-kPi, kPi};
  for (const auto& sg : s.singularities) cuts.push_back(sg.angle);
  std::sort(cuts.begin(), cuts.end());
  boost::math::quadrature::tanh_sinh<double> q;
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] < 1e-12) continue;
    re += q.integrate([&](double th) { return std::real(s.value(th) * std::polar(1.0, -j * th)); }, cuts[i],
                      cuts[i + 1]);
    im += q.integrate([&](double th) { return std::imag(s.value(th) * std::polar(1.0, -j * th)); }, cuts[i],
                      cuts[i + 1]);
  }
  return cplx(re, im) / (2.0 * kPi);
}

// Unrotated symbol: exp(T + a1 X_{K1} + a2 X_{K2}) |e^{i psi} - e^{i th}|^{b1} |e^{i psi} - e^{i th'}|^{b2}.
double unrotated_value(const SymbolParams& p, double psi) {
  double e = 0.0;
  for (const auto& [k, v] : p.t_coeffs) e += std::real(v * std::polar(1.0, k * psi));
  for (int k = 1; k <= p.k1; ++k) e -= p.alpha1 * std::cos(k * (psi - p.theta)) / k;
  for (int k = 1; k <= p.k2; ++k) e -= p.alpha2 * std::cos(k * (psi - p.theta)) / k;
  double f = std::exp(e);
  if (p.beta1 != 0.0) f *= std::pow(std::abs(std::polar(1.0, psi) - std::polar(1.0, p.theta)), p.beta1);
  if (p.beta2 != 0.0) f *= std::pow(std::abs(std::polar(1.0, psi) - std::polar(1.0, p.theta_prime)), p.beta2);
  return f;
}

SymbolParams sample_params(double theta, double theta_prime) {
  SymbolParams p;
  p.theta = theta;
  p.theta_prime = theta_prime;
  p.alpha1 = 0.4;
  p.alpha2 = -0.2;
  p.k1 = 2;
  p.k2 = 3;
  p.t_coeffs = real_laurent_family({{1, cplx(0.15, -0.05)}, {2, cplx(0.0, 0.1)}});
  p.beta1 = 0.7;
  p.beta2 = 1.3;
  return p;
}

std::vector<SymbolParams> corpus() {
  std::ifstream in(CUECHAOS_DEFAULT_CORPUS);
  return read_symbol_corpus(in);
}

std::vector<cplx> companion_roots(const std::vector<cplx>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) m(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) m(i, n - 1) = -c[static_cast<std::size_t>(i)];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
  return {es.eigenvalues().data(), es.eigenvalues().data() + n};
}

}  // namespace

TEST(Angles, WrapAndDistance) {
  EXPECT_NEAR(wrap_angle(3.0 * kPi / 2.0), -kPi / 2.0, 1e-15);
  EXPECT_NEAR(wrap_angle(-kPi), kPi, 1e-15);
  EXPECT_NEAR(circle_distance(0.1, 2.0 * kPi - 0.1), 0.2, 1e-14);
}

TEST(Laurent, IndexChecks) {
  const LaurentCoefficients c(1, {1.0, 2.0, 3.0});
  EXPECT_EQ(c(-1), cplx(1.0));
  EXPECT_EQ(c(1), cplx(3.0));
  EXPECT_THROW(c(2), InvalidArgument);
  EXPECT_THROW(LaurentCoefficients(2, {1.0}), InvalidArgument);
}

TEST(Coefficients, ConstantSymbol) {
  const auto c = fourier_coefficients(Symbol{}, 4);
  EXPECT_EQ(c(0), cplx(1.0));
  for (int j = 1; j <= 4; ++j) {
    EXPECT_EQ(c(j), cplx(0.0));
    EXPECT_EQ(c(-j), cplx(0.0));
  }
}

TEST(Coefficients, SquaredDistanceToOne) {
  const auto c = fourier_coefficients(single_singularity_symbol(2.0), 5);
  EXPECT_NEAR(std::abs(c(0) - 2.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c(1) + 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c(-1) + 1.0), 0.0, 1e-14);
  for (int j = 2; j <= 5; ++j) EXPECT_NEAR(std::abs(c(j)), 0.0, 1e-14);
}

TEST(Coefficients, UnitExponentZeroModeIsFourOverPi) {
  const auto s = single_singularity_symbol(1.0);
  const auto c = fourier_coefficients(s, 0);
  EXPECT_NEAR(c(0).real(), 4.0 / kPi, 1e-14);
  EXPECT_NEAR(quadrature_coefficient(s, 0).real(), 4.0 / kPi, 1e-10);
}

TEST(Coefficients, SingleSingularityMatchesQuadrature) {
  for (double beta : {0.3, 1.0, 1.7}) {
    const auto s = single_singularity_symbol(beta, 0.8);
    const auto c = fourier_coefficients(s, 6);
    for (int j = -6; j <= 6; ++j)
      EXPECT_NEAR(std::abs(c(j) - quadrature_coefficient(s, j)), 0.0, 1e-8) << beta << " " << j;
  }
}

TEST(Coefficients, FullSymbolMatchesQuadrature) {
  const auto s = build_symbol(sample_params(1.0, 2.5));
  const auto c = fourier_coefficients(s, 8);
  for (int j = -8; j <= 8; ++j) EXPECT_NEAR(std::abs(c(j) - quadrature_coefficient(s, j)), 0.0, 1e-8) << j;
  for (int j = 0; j <= 8; ++j) EXPECT_NEAR(std::abs(c(-j) - std::conj(c(j))), 0.0, 1e-15);
}

TEST(Coefficients, SmallExponentPairMatchesQuadrature) {
  Symbol s;
  s.singularities = {{0.5, 1e-3}, {-0.5, 0.05}};
  const auto c = fourier_coefficients(s, 4);
  for (int j = -4; j <= 4; ++j) EXPECT_NEAR(std::abs(c(j) - quadrature_coefficient(s, j)), 0.0, 1e-8) << j;
}

TEST(Coefficients, NegativeCountRejected) { EXPECT_THROW(fourier_coefficients(Symbol{}, -1), InvalidArgument); }

TEST(BuildSymbol, PureTwoSingularity) {
  SymbolParams p;
  p.theta = 1.0;
  p.theta_prime = 0.4;
  p.beta1 = 0.5;
  p.beta2 = 1.5;
  const auto s = build_symbol(p);
  EXPECT_TRUE(s.laurent.empty());
  ASSERT_EQ(s.singularities.size(), 2u);
  EXPECT_NEAR(s.u, 0.3, 1e-15);
  EXPECT_NEAR(s.phi, 0.7, 1e-15);
}

TEST(BuildSymbol, FirstArcSetKeepsExponentOrder) {
  SymbolParams p;
  p.theta = kPi;
  p.theta_prime = kPi / 2.0;
  p.beta1 = 0.5;
  p.beta2 = 1.5;
  const auto s = build_symbol(p);
  EXPECT_NEAR(s.singularities[0].angle, kPi / 4.0, 1e-15);
  EXPECT_EQ(s.singularities[0].exponent, 0.5);
  EXPECT_EQ(s.singularities[1].exponent, 1.5);
}

TEST(BuildSymbol, SecondArcSetSwapsExponents) {
  SymbolParams p;
  p.theta = kPi / 2.0;
  p.theta_prime = kPi;
  p.beta1 = 0.5;
  p.beta2 = 1.5;
  const auto s = build_symbol(p);
  EXPECT_NEAR(s.singularities[0].angle, kPi / 4.0, 1e-15);
  EXPECT_EQ(s.singularities[0].exponent, 1.5);
  EXPECT_EQ(s.singularities[1].exponent, 0.5);
}

TEST(BuildSymbol, ArcSetBoundaries) {
  EXPECT_TRUE(in_first_arc_set(kPi));
  EXPECT_FALSE(in_first_arc_set(-kPi));
  EXPECT_FALSE(in_first_arc_set(0.0));
  EXPECT_TRUE(in_first_arc_set(-1.5 * kPi));
  EXPECT_FALSE(in_first_arc_set(-0.5 * kPi));
}

TEST(BuildSymbol, HalfTurnSeparationPutsThetaAtPlusU) {
  for (auto [th, thp] : {std::pair{kPi + 0.2, 0.2}, std::pair{0.2, kPi + 0.2}}) {
    SymbolParams p;
    p.theta = th;
    p.theta_prime = thp;
    p.beta1 = 1.0;
    const auto s = build_symbol(p);
    // The point carrying beta1 must be e^{i theta} after undoing the rotation.
    const auto& carrier = s.singularities[0].exponent == 1.0 ? s.singularities[0] : s.singularities[1];
    EXPECT_NEAR(std::abs(std::polar(1.0, carrier.angle + s.phi) - std::polar(1.0, th)), 0.0, 1e-14);
  }
}

TEST(BuildSymbol, MergedPoints) {
  SymbolParams p;
  p.theta = p.theta_prime = 2.0;
  p.beta1 = 0.5;
  p.beta2 = 0.7;
  const auto s = build_symbol(p);
  ASSERT_EQ(s.singularities.size(), 1u);
  EXPECT_NEAR(s.singularities[0].exponent, 1.2, 1e-15);
  EXPECT_NEAR(s.singularities[0].angle, 0.0, 1e-15);
}

TEST(BuildSymbol, RotatedValueMatchesUnrotatedDefinition) {
  const std::vector<std::pair<double, double>> pairs{
      {1.0, 2.5}, {2.5, 1.0}, {0.2, 5.9}, {5.9, 0.2}, {4.0, 0.3}, {0.3, 4.0}, {1.0, 1.0}, {kPi + 0.3, 0.3}};
  for (auto [th, thp] : pairs) {
    const auto p = sample_params(th, thp);
    const auto s = build_symbol(p);
    for (int g = 0; g < 37; ++g) {
      const double psi = -kPi + 2.0 * kPi * (g + 0.37) / 37.0;
      EXPECT_NEAR(s.value(psi).real(), unrotated_value(p, psi + s.phi), 1e-12) << th << " " << thp;
      EXPECT_NEAR(s.value(psi).imag(), 0.0, 1e-12);
    }
  }
}

TEST(BuildSymbol, RejectsInvalidParameters) {
  SymbolParams p;
  p.theta = 7.0;
  EXPECT_THROW(build_symbol(p), InvalidArgument);
  p.theta = 1.0;
  p.k1 = 3;
  p.k2 = 2;
  EXPECT_THROW(build_symbol(p), InvalidArgument);
  p.k2 = 3;
  p.beta1 = -0.1;
  EXPECT_THROW(build_symbol(p), InvalidArgument);
  p.beta1 = 0.0;
  p.t_coeffs = {{1, cplx(1.0)}};
  EXPECT_THROW(build_symbol(p), InvalidArgument);
}

TEST(Determinant, ConstantSymbolIsOne) {
  const auto c = fourier_coefficients(Symbol{}, 9);
  for (int n = 1; n <= 10; ++n) EXPECT_NEAR(std::abs(toeplitz_det(c, n).value - 1.0), 0.0, 1e-14);
}

TEST(Determinant, SquaredDistanceGivesNPlusOne) {
  const auto c = fourier_coefficients(single_singularity_symbol(2.0), 6);
  for (int n = 1; n <= 6; ++n) EXPECT_NEAR(toeplitz_det(c, n).value.real(), n + 1.0, 1e-12) << n;
}

TEST(Determinant, DegenerateMatrixFlagged) {
  const LaurentCoefficients c(1, {1.0, 1.0, 1.0});
  const auto d = toeplitz_det(c, 2);
  EXPECT_TRUE(d.degenerate);
  EXPECT_EQ(d.value, cplx(0.0));
}

TEST(Determinant, RejectsShortCoefficientSpan) {
  const auto c = fourier_coefficients(Symbol{}, 2);
  EXPECT_THROW(toeplitz_det(c, 4), InvalidArgument);
}

TEST(Determinant, HeineSzegoMonteCarlo) {
  const auto s = build_symbol(sample_params(1.0, 2.5));
  const int n = 6;
  const double det = toeplitz_det(fourier_coefficients(s, n - 1), n).value.real();
  std::vector<double> v(100000);
  for (std::size_t i = 0; i < v.size(); ++i) {
    RngStream r(41, i);
    const auto cue = sample_cue(n, r, static_cast<std::size_t>(s.degree()));
    v[i] = product_over_spectrum(s, cue).real();
  }
  EXPECT_LT(estimate_mean(v).z_score(det), 4.0);
}

TEST(Determinant, ProductOverSpectrumMatchesEigenvalues) {
  const auto s = build_symbol(sample_params(1.0, 2.5));
  RngStream r(42, 0);
  const auto cue = sample_cue(10, r, 10);
  cplx direct = 1.0;
  for (const auto& z : companion_roots(cue.secular)) direct *= s.value(std::arg(z));
  EXPECT_NEAR(std::abs(product_over_spectrum(s, cue) / direct - 1.0), 0.0, 1e-8);
}

TEST(Determinant, MomentExponentMatchesRotatedProduct) {
  // Rotating the spectrum by -phi maps the unrotated moment onto the rotated symbol.
  const auto p = sample_params(1.0, 2.5);
  const auto s = build_symbol(p);
  RngStream r(43, 0);
  const auto cue = sample_cue(10, r, 10);
  cplx rotated = 1.0;
  for (const auto& z : companion_roots(cue.secular)) rotated *= s.value(std::arg(z) - s.phi);
  EXPECT_NEAR(std::exp(moment_exponent(p, cue)) / rotated.real(), 1.0, 1e-8);
}

TEST(Opuc, ConstantSymbolHasUnitChis) {
  const auto r = opuc_chi(fourier_coefficients(Symbol{}, 5), 6);
  for (double chi : r.chis) EXPECT_NEAR(chi, 1.0, 1e-15);
}

TEST(Opuc, SquaredDistanceChis) {
  const auto r = opuc_chi(fourier_coefficients(single_singularity_symbol(2.0), 3), 4);
  EXPECT_NEAR(r.chis[0], 1.0 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(r.chis[1], std::sqrt(2.0 / 3.0), 1e-14);
}

TEST(Opuc, ChiProductMatchesDeterminantForCorpus) {
  for (const auto& p : corpus()) {
    const auto c = fourier_coefficients(build_symbol(p), 63);
    for (int n : {1, 2, 8, 32, 64}) {
      const auto r = opuc_chi(c, n);
      double log_prod = 0.0;
      for (double chi : r.chis) log_prod -= 2.0 * std::log(chi);
      const auto d = toeplitz_det(c, n);
      EXPECT_LT(std::abs(std::expm1(log_prod - d.log_abs)), 1e-8) << n;
      EXPECT_NO_THROW(checked_log_det(c, n));
    }
  }
}

TEST(Opuc, LevinsonMatchesLinearSolve) {
  const auto c = fourier_coefficients(build_symbol(sample_params(0.3, 4.0)), 8);
  for (int n : {1, 3, 8}) {
    const auto rec = szego_levinson(c, n);
    Eigen::MatrixXcd a = toeplitz_matrix(c, n);
    Eigen::VectorXcd rhs(n);
    for (int k = 0; k < n; ++k) rhs(k) = -c(k - n);
    const Eigen::VectorXcd sol = a.partialPivLu().solve(rhs);
    for (int m = 0; m < n; ++m) EXPECT_NEAR(std::abs(rec.phi[static_cast<std::size_t>(m)] - sol(m)), 0.0, 1e-12);
    EXPECT_EQ(rec.phi[static_cast<std::size_t>(n)], cplx(1.0));
  }
}

TEST(Opuc, SquaredDistanceFirstPolynomial) {
  const auto rec = szego_levinson(fourier_coefficients(single_singularity_symbol(2.0), 1), 1);
  EXPECT_NEAR(std::abs(rec.phi[0] - 0.5), 0.0, 1e-15);
}

TEST(Opuc, OrthonormalityOnFineGrid) {
  auto p = sample_params(1.0, 2.5);
  p.beta1 = 1.0;
  p.beta2 = 2.0;
  const auto s = build_symbol(p);
  const int order = 6;
  const auto c = fourier_coefficients(s, order);
  const auto chi = opuc_chi(c, order + 1);
  std::vector<std::vector<cplx>> polys;
  for (int k = 0; k <= order; ++k) polys.push_back(szego_levinson(c, k).phi);
  const std::size_t grid = std::size_t{1} << 14;
  std::vector<cplx> f(grid);
  std::vector<std::vector<cplx>> vals(polys.size(), std::vector<cplx>(grid));
  for (std::size_t g = 0; g < grid; ++g) {
    const double th = 2.0 * kPi * static_cast<double>(g) / static_cast<double>(grid);
    f[g] = s.value(th);
    const cplx z = std::polar(1.0, th);
    for (std::size_t k = 0; k < polys.size(); ++k) {
      cplx acc = 0.0;
      for (std::size_t m = polys[k].size(); m-- > 0;) acc = acc * z + polys[k][m];
      vals[k][g] = acc * chi.chis[k];
    }
  }
  for (std::size_t a = 0; a < polys.size(); ++a)
    for (std::size_t b = a; b < polys.size(); ++b) {
      cplx acc = 0.0;
      for (std::size_t g = 0; g < grid; ++g) acc += vals[a][g] * std::conj(vals[b][g]) * f[g];
      acc /= static_cast<double>(grid);
      EXPECT_NEAR(std::abs(acc - (a == b ? 1.0 : 0.0)), 0.0, 1e-7) << a << "," << b;
    }
}

TEST(Opuc, RejectsNonHermitianMoments) {
  const LaurentCoefficients c(1, {cplx(0.0, 1.0), 2.0, cplx(0.0, 1.0)});
  EXPECT_THROW(opuc_chi(c, 2), InvalidArgument);
}

TEST(Opuc, IndefiniteMomentsFail) {
  const LaurentCoefficients c(1, {2.0, 1.0, 2.0});
  EXPECT_THROW(opuc_chi(c, 2), PrecisionFailure);
}

TEST(Opuc, ConsistencyAlarmRaised) {
  const auto c = fourier_coefficients(single_singularity_symbol(1.0), 4);
  EXPECT_THROW(checked_log_det(c, 5, -1.0), ConsistencyAlarm);
}

TEST(YColumn, ConstantSymbol) {
  const auto c = fourier_coefficients(Symbol{}, 4);
  const YFirstColumn y(c, 4);
  const cplx z(0.3, -0.8);
  const auto v = y.at(z);
  EXPECT_NEAR(std::abs(v.y11 - std::pow(z, 4)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v.y21 + 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v.dy11 - 4.0 * std::pow(z, 3)), 0.0, 1e-14);
  EXPECT_EQ(v.dy21, cplx(0.0));
}

TEST(YColumn, LeadingCoefficientsMatchDeterminants) {
  const auto c = fourier_coefficients(build_symbol(sample_params(2.0, 0.5)), 8);
  const auto chi = opuc_chi(c, 8);
  for (int n = 1; n <= 8; ++n) {
    const YFirstColumn y(c, n);
    // Y21 has constant term -chi_{n-1}^2 and chi_{n-1}^2 = D_{n-2} / D_{n-1}.
    const double d_prev = n >= 2 ? chi.dets[static_cast<std::size_t>(n - 2)] : 1.0;
    EXPECT_NEAR(-y.y21()[0].real() * chi.dets[static_cast<std::size_t>(n - 1)] / d_prev, 1.0, 1e-8);
    EXPECT_EQ(y.y11().back(), cplx(1.0));
  }
}

TEST(Szego, TrivialSymbolIsOne) {
  const Symbol s;
  EXPECT_EQ(szego_function(s, cplx(0.3, 0.2), SzegoSide::kInside), cplx(1.0));
  EXPECT_EQ(szego_function(s, cplx(3.0, 0.2), SzegoSide::kOutside), cplx(1.0));
}

TEST(Szego, InsideValueAtOriginIsOne) {
  for (const auto& p : corpus())
    EXPECT_NEAR(std::abs(szego_function(build_symbol(p), 0.0, SzegoSide::kInside) - 1.0), 0.0, 1e-14);
}

TEST(Szego, FactorizationOnCircleForCorpus) {
  RngStream r(44, 0);
  for (const auto& p : corpus()) {
    const auto s = build_symbol(p);
    for (int i = 0; i < 100; ++i) {
      const double th = -kPi + 2.0 * kPi * r.uniform();
      const cplx z = std::polar(1.0, th);
      const cplx f = szego_function(s, z, SzegoSide::kInside) / szego_function(s, z, SzegoSide::kOutside);
      EXPECT_NEAR(std::abs(f - s.value(th)), 0.0, 1e-8 * std::max(1.0, std::abs(s.value(th))));
    }
  }
}

TEST(Szego, BranchCutsRejected) {
  const auto s = single_singularity_symbol(1.0, 0.5);
  EXPECT_THROW(szego_function(s, 2.0 * std::polar(1.0, 0.5), SzegoSide::kInside), BranchCutError);
  EXPECT_THROW(szego_function(s, 0.5 * std::polar(1.0, 0.5), SzegoSide::kOutside), BranchCutError);
  EXPECT_THROW(szego_function(s, 0.0, SzegoSide::kOutside), BranchCutError);
  EXPECT_NO_THROW(szego_function(s, 0.5 * std::polar(1.0, 0.5), SzegoSide::kInside));
  EXPECT_NO_THROW(szego_function(s, 2.0 * std::polar(1.0, -0.5), SzegoSide::kOutside));
}

TEST(Deform, EndpointsAndFlatPotential) {
  const auto s = build_symbol(sample_params(1.0, 2.5));
  const auto full = fourier_coefficients(s, 6);
  const auto at1 = deform_symbol(s, 1.0, 6);
  const auto at0 = deform_symbol(s, 0.0, 6);
  Symbol pure;
  pure.singularities = s.singularities;
  const auto fh = fourier_coefficients(pure, 6);
  for (int j = -6; j <= 6; ++j) {
    EXPECT_NEAR(std::abs(at1(j) - full(j)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(at0(j) - fh(j)), 0.0, 1e-14);
  }
  const auto flat = single_singularity_symbol(0.8, 0.3);
  const auto a = deform_symbol(flat, 0.2, 5), b = deform_symbol(flat, 0.9, 5);
  for (int j = -5; j <= 5; ++j) EXPECT_EQ(a(j), b(j));
}

TEST(Deform, NonPositiveSmoothFactorRejected) {
  Symbol s;
  s.real_valued = false;
  s.laurent = {{1, cplx(0.0, kPi / 2.0)}, {-1, cplx(0.0, kPi / 2.0)}};
  EXPECT_THROW(deform_symbol(s, 0.9, 4), InvalidSymbol);
  EXPECT_THROW(deform_symbol(s, 1.5, 4), InvalidArgument);
}

TEST(DifferentialIdentity, FlatPotentialGivesZero) {
  const auto r = differential_identity_check(single_singularity_symbol(0.8, 0.3), 6, 0.5);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
}

TEST(DifferentialIdentity, SingleCosineModeInterior) {
  SymbolParams p;
  p.theta = 1.0;
  p.theta_prime = 2.0;
  p.t_coeffs = real_laurent_family({{1, cplx(0.3, 0.0)}});
  p.beta1 = 0.6;
  p.beta2 = 1.1;
  const auto r = differential_identity_check(build_symbol(p), 4, 0.5);
  EXPECT_LT(r.abs_diff, 1e-4);
  EXPECT_GT(std::abs(r.lhs), 1e-3);
}

TEST(DifferentialIdentity, Endpoints) {
  const auto s = build_symbol(sample_params(1.0, 2.5));
  for (double t : {0.0, 1.0}) EXPECT_LT(differential_identity_check(s, 5, t).abs_diff, 1e-3) << t;
}

TEST(DifferentialIdentity, RejectsLargeSize) {
  EXPECT_THROW(differential_identity_check(Symbol{}, 33, 0.5), InvalidArgument);
  EXPECT_THROW(differential_identity_check(Symbol{}, 4, 0.5, 100), InvalidArgument);
}

TEST(Corpus, RoundTrip) {
  const auto records = corpus();
  ASSERT_GE(records.size(), 5u);
  for (const auto& p : records) {
    const auto q = parse_symbol_record(format_symbol_record(p));
    EXPECT_EQ(q.theta, p.theta);
    EXPECT_EQ(q.theta_prime, p.theta_prime);
    EXPECT_EQ(q.alpha1, p.alpha1);
    EXPECT_EQ(q.alpha2, p.alpha2);
    EXPECT_EQ(q.k1, p.k1);
    EXPECT_EQ(q.k2, p.k2);
    EXPECT_EQ(q.beta1, p.beta1);
    EXPECT_EQ(q.beta2, p.beta2);
    EXPECT_EQ(q.t_coeffs, p.t_coeffs);
  }
}

TEST(Corpus, FieldOrder) {
  const auto p = parse_symbol_record("0.5 2.0 0.3 -0.1 1 2 2 0.2 -0.1 0.0 0.4 0.6 0.9");
  EXPECT_EQ(p.theta, 0.5);
  EXPECT_EQ(p.theta_prime, 2.0);
  EXPECT_EQ(p.alpha1, 0.3);
  EXPECT_EQ(p.alpha2, -0.1);
  EXPECT_EQ(p.k1, 1);
  EXPECT_EQ(p.k2, 2);
  EXPECT_EQ(p.t_coeffs.at(1), cplx(0.2, -0.1));
  EXPECT_EQ(p.t_coeffs.at(-1), cplx(0.2, 0.1));
  EXPECT_EQ(p.t_coeffs.at(2), cplx(0.0, 0.4));
  EXPECT_EQ(p.beta1, 0.6);
  EXPECT_EQ(p.beta2, 0.9);
}

TEST(Corpus, MalformedRecordsRejected) {
  EXPECT_THROW(parse_symbol_record("0.5 2.0 0.3"), InvalidArgument);
  EXPECT_THROW(parse_symbol_record("0.5 2.0 0 0 1 1 1 0.2"), InvalidArgument);
  EXPECT_THROW(parse_symbol_record("0.5 2.0 0 0 1 1 0 0.1 0.2 9"), InvalidArgument);
  std::istringstream in("# comment\n\n0.5 2.0 0 0 1 1 0 0.1 0.2 # trailing\n");
  EXPECT_EQ(read_symbol_corpus(in).size(), 1u);
}
