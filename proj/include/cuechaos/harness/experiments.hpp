#pragma once

// Named experiments. Each returns its criterion verdict, CSV tables and
// notes; `run_experiment` adds timing and turns failures into FAIL rows.

#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "cuechaos/asymptotics.hpp"
#include "cuechaos/chaos_measure.hpp"
#include "cuechaos/cue_sampler.hpp"
#include "cuechaos/gaussian_field.hpp"
#include "cuechaos/harness/config.hpp"
#include "cuechaos/harness/parallel.hpp"
#include "cuechaos/harness/report.hpp"
#include "cuechaos/rng.hpp"
#include "cuechaos/stats.hpp"
#include "cuechaos/symbol_toeplitz.hpp"

namespace cuechaos {

/// Disjoint stream ranges per experiment: (experiment id << 40) | index.
inline std::uint64_t stream_id(int experiment, std::uint64_t index) {
  return (static_cast<std::uint64_t>(experiment) << 40) | index;
}
inline constexpr std::uint64_t kReferenceStreams = std::uint64_t{1} << 39;

inline double log_det_of(const Symbol& s, int n) {
  const auto d = toeplitz_det(fourier_coefficients(s, n - 1), n);
  if (d.degenerate) throw PrecisionFailure("degenerate Toeplitz determinant");
  return d.log_abs;
}

struct RatioPrediction {
  double exact_ratio = 1.0;
  double prediction = 1.0;
  double rel_err = 0.0;
};

/// D_{n-1}(f) / D_{n-1}(f without the alpha and T parts) against the
/// closed-form prediction.
inline RatioPrediction ratio_vs_prediction(const TestimateParams& p, int n) {
  if (n < 1 || n > 512) throw InvalidArgument("ratio_vs_prediction: need 1 <= n <= 512");
  TestimateParams base = p;
  base.alpha1 = base.alpha2 = 0.0;
  base.t_coeffs.clear();
  RatioPrediction r;
  r.exact_ratio = std::exp(log_det_of(build_symbol(p), n) - log_det_of(build_symbol(base), n));
  r.prediction = predict_testimate(p);
  r.rel_err = std::abs(r.exact_ratio / r.prediction - 1.0);
  return r;
}

inline std::vector<SymbolParams> load_corpus(const ExperimentConfig& cfg) {
  std::ifstream in(cfg.corpus);
  if (!in) throw InvalidArgument("cannot open symbol corpus " + cfg.corpus.string());
  auto corpus = read_symbol_corpus(in);
  if (corpus.empty()) throw InvalidArgument("symbol corpus is empty");
  return corpus;
}

inline std::vector<SymbolParams> pick_symbols(const std::vector<SymbolParams>& corpus,
                                              const std::vector<int>& idx) {
  std::vector<SymbolParams> out;
  for (int i : idx) {
    if (i < 0 || static_cast<std::size_t>(i) >= corpus.size())
      throw InvalidArgument("symbol index out of range: " + std::to_string(i));
    out.push_back(corpus[static_cast<std::size_t>(i)]);
  }
  return out;
}

inline std::vector<std::string> mass_csv_header() {
  return {"seed", "stream", "N", "M", "beta", "grid_size", "mass", "g", "e1", "e2"};
}

inline std::vector<std::string> mass_csv_row(const MassSample& s) {
  auto opt = [](const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); };
  return {std::to_string(s.key.seed), std::to_string(s.key.stream), std::to_string(s.n),
          std::to_string(s.m), fmt_double(s.beta), std::to_string(s.grid_size), fmt_double(s.mass),
          opt(s.g), opt(s.e1), opt(s.e2)};
}

inline CriterionResult make_criterion(int id, std::string name, std::string experiment, double value,
                                      double tol, bool ok, const ConfigSection& sec, double default_budget,
                                      std::string comparison = "<=") {
  CriterionResult c;
  c.id = id;
  c.name = std::move(name);
  c.experiment = std::move(experiment);
  c.value = value;
  c.tolerance = tol;
  c.within_tolerance = ok;
  c.budget_s = sec.get<double>("budget_s", default_budget);
  c.comparison = std::move(comparison);
  return c;
}

// ---------------------------------------------------------------------------

/// E[Tr U^j conj(Tr U^k)] = delta_{jk} min(j, N) and E Tr U^j = 0.
inline ExperimentOutput exp_trace_moments(const ExperimentConfig& cfg) {
  const auto sec = cfg.section("trace_moments");
  const int n = sec.get("n", 16);
  const std::size_t draws = sec.get<std::size_t>("draws", 200000);
  const int kmax = sec.get("max_power", 8);
  const double z_tol = sec.get("z_tolerance", 4.0);
  if (n < 1 || kmax < 1 || draws < 2) throw InvalidArgument("trace_moments: bad parameters");

  const auto traces = parallel_map<std::vector<cplx>>(draws, cfg.workers, [&](std::size_t i) {
    RngStream rs(cfg.seed, stream_id(1, i));
    return sample_cue(n, rs, static_cast<std::size_t>(kmax)).traces;
  });

  ExperimentOutput out;
  out.experiment = "trace_moments";
  CsvTable t{"trace_moments", {"j", "k", "part", "mean", "std_error", "target", "z"}, {}};
  double worst = 0.0;
  std::vector<double> buf(draws);
  auto check = [&](int j, int k, const char* part, double target, auto value) {
    for (std::size_t i = 0; i < draws; ++i) buf[i] = value(traces[i]);
    const auto m = estimate_mean(buf);
    const double z = m.z_score(target);
    worst = std::max(worst, z);
    t.rows.push_back({std::to_string(j), std::to_string(k), part, fmt_double(m.mean), fmt_double(m.std_error),
                      fmt_double(target), fmt_double(z)});
  };
  for (int j = 1; j <= kmax; ++j) {
    check(j, 0, "re", 0.0, [&](const auto& tr) { return tr[j - 1].real(); });
    check(j, 0, "im", 0.0, [&](const auto& tr) { return tr[j - 1].imag(); });
    for (int k = 1; k <= kmax; ++k) {
      const double target = j == k ? std::min(j, n) : 0.0;
      check(j, k, "re", target, [&](const auto& tr) { return (tr[j - 1] * std::conj(tr[k - 1])).real(); });
      check(j, k, "im", 0.0, [&](const auto& tr) { return (tr[j - 1] * std::conj(tr[k - 1])).imag(); });
    }
  }
  out.tables.push_back(std::move(t));
  out.criteria.push_back(make_criterion(1, "trace moments", out.experiment, worst, z_tol, worst <= z_tol, sec, 120));
  out.criteria.back().note = "max |z| over " + std::to_string(2 * kmax * (kmax + 1)) + " moments";
  return out;
}

/// Monte Carlo E prod_j f(e^{i theta_j}) against D_{N-1}(f).
inline ExperimentOutput exp_heine_szego(const ExperimentConfig& cfg) {
  const auto sec = cfg.section("heine_szego");
  const int n = sec.get("n", 8);
  const std::size_t draws = sec.get<std::size_t>("draws", 200000);
  const double z_tol = sec.get("z_tolerance", 4.0);
  const auto symbols = pick_symbols(load_corpus(cfg), sec.get_list<int>("symbols", {0, 1, 2}));

  std::size_t kmax = 1;
  std::vector<double> exact;
  for (const auto& p : symbols) {
    for (const auto& [k, v] : p.t_coeffs) kmax = std::max(kmax, static_cast<std::size_t>(std::abs(k)));
    kmax = std::max(kmax, static_cast<std::size_t>(p.k2));
    exact.push_back(std::exp(log_det_of(build_symbol(p), n)));
  }
  const auto values = parallel_map<std::vector<double>>(draws, cfg.workers, [&](std::size_t i) {
    RngStream rs(cfg.seed, stream_id(2, i));
    const auto s = sample_cue(n, rs, kmax);
    std::vector<double> v;
    for (const auto& p : symbols) v.push_back(std::exp(moment_exponent(p, s)));
    return v;
  });

  ExperimentOutput out;
  out.experiment = "heine_szego";
  CsvTable t{"heine_szego", {"symbol", "determinant", "mc_mean", "std_error", "z"}, {}};
  double worst = 0.0;
  std::vector<double> buf(draws);
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    for (std::size_t i = 0; i < draws; ++i) buf[i] = values[i][s];
    const auto m = estimate_mean(buf);
    const double z = m.z_score(exact[s]);
    worst = std::max(worst, z);
    t.rows.push_back({std::to_string(s), fmt_double(exact[s]), fmt_double(m.mean), fmt_double(m.std_error),
                      fmt_double(z)});
  }
  out.tables.push_back(std::move(t));
  out.criteria.push_back(make_criterion(2, "heine-szego", out.experiment, worst, z_tol, worst <= z_tol, sec, 180));
  out.criteria.back().note = "max |z| over " + std::to_string(symbols.size()) + " symbols";
  return out;
}

/// D(|z-1|^2) = N + 1 and prod chi^{-2} = D for corpus symbols.
inline ExperimentOutput exp_det_identities(const ExperimentConfig& cfg) {
  const auto sec = cfg.section("det_identities");
  const int n_max = sec.get("n_max", 64);
  const double tol = sec.get("rel_tolerance", 1e-8);
  const auto ns = sec.get_list<int>("corpus_n", {8, 16, 32, 64});
  const auto corpus = load_corpus(cfg);

  ExperimentOutput out;
  out.experiment = "det_identities";
  CsvTable t{"det_identities", {"kind", "symbol", "N", "lu_log_det", "reference_log_det", "rel_err"}, {}};
  double worst = 0.0;
  const auto fh = fourier_coefficients(single_singularity_symbol(2.0), n_max);
  for (int n = 1; n <= n_max; ++n) {
    const auto d = toeplitz_det(fh, n);
    const double rel = std::abs(d.value.real() / (n + 1.0) - 1.0) + std::abs(d.value.imag()) / (n + 1.0);
    worst = std::max(worst, rel);
    t.rows.push_back({"abs_sq", "-", std::to_string(n), fmt_double(d.log_abs), fmt_double(std::log(n + 1.0)),
                      fmt_double(rel)});
  }
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const auto sym = build_symbol(corpus[s]);
    const int top = *std::max_element(ns.begin(), ns.end());
    const auto c = fourier_coefficients(sym, top);
    for (int n : ns) {
      if (n < 1 || n > 64) throw InvalidArgument("det_identities: corpus N must lie in [1, 64]");
      const auto d = toeplitz_det(c, n);
      const auto chi = opuc_chi(c, n);
      double log_prod = 0.0;
      for (double x : chi.chis) log_prod -= 2.0 * std::log(x);
      const double rel = std::abs(std::expm1(log_prod - d.log_abs));
      worst = std::max(worst, rel);
      t.rows.push_back({"chi_product", std::to_string(s), std::to_string(n), fmt_double(d.log_abs),
                        fmt_double(log_prod), fmt_double(rel)});
    }
  }
  out.tables.push_back(std::move(t));
  out.criteria.push_back(make_criterion(3, "determinant identities", out.experiment, worst, tol, worst < tol, sec, 60, "<"));
  return out;
}

/// d/dt log D(f_t) by finite differences against the contour integral.
inline ExperimentOutput exp_diff_identity(const ExperimentConfig& cfg) {
  const auto sec = cfg.section("diff_identity");
  const int n = sec.get("n", 8);
  const auto ts = sec.get_list<double>("t", {0.25, 0.5, 0.75});
  const double tol = sec.get("abs_tolerance", 1e-4);
  const auto symbols = pick_symbols(load_corpus(cfg), sec.get_list<int>("symbols", {0, 1}));

  ExperimentOutput out;
  out.experiment = "diff_identity";
  CsvTable t{"diff_identity", {"symbol", "t", "lhs", "rhs", "abs_diff", "grid"}, {}};
  double worst = 0.0;
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    const auto sym = build_symbol(symbols[s]);
    for (double tv : ts) {
      const auto c = differential_identity_check(sym, n, tv);
      worst = std::max(worst, c.abs_diff);
      t.rows.push_back({std::to_string(s), fmt_double(tv), fmt_double(c.lhs), fmt_double(c.rhs),
                        fmt_double(c.abs_diff), std::to_string(c.grid_used)});
    }
  }
  out.tables.push_back(std::move(t));
  out.criteria.push_back(make_criterion(4, "differential identity", out.experiment, worst, tol, worst < tol, sec, 60, "<"));
  return out;
}

/// Exact determinant ratios against the closed-form exponential moment.
inline ExperimentOutput exp_testimate(const ExperimentConfig& cfg) {
  const auto sec = cfg.section("testimate");
  const auto ns = sec.get_list<int>("n", {32, 64, 128, 256});
  const double tol = sec.get("rel_tolerance", 0.05);
  TestimateParams p;
  p.alpha1 = sec.get("alpha1", 1.0);
  p.alpha2 = sec.get("alpha2", 0.0);
  p.beta1 = sec.get("beta1", 1.0);
  p.beta2 = sec.get("beta2", 0.0);
  p.k1 = sec.get("k1", 2);
  p.k2 = sec.get("k2", 2);
  p.theta = sec.get("theta", 0.7);
  p.theta_prime = sec.get("theta_prime", 0.7);
  p.t_coeffs = real_laurent_family({{sec.get("t_mode", 1), {sec.get("t_re", 0.3), sec.get("t_im", 0.2)}}});

  ExperimentOutput out;
  out.experiment = "testimate";
  CsvTable t{"testimate", {"check", "N", "exact_ratio", "prediction", "rel_err"}, {}};
  std::vector<double> errs;
  for (int n : ns) {
    const auto r = ratio_vs_prediction(p, n);
    errs.push_back(r.rel_err);
    t.rows.push_back({"testimate", std::to_string(n), fmt_double(r.exact_ratio), fmt_double(r.prediction),
                      fmt_double(r.rel_err)});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < errs.size(); ++i) decreasing = decreasing && errs[i] < errs[i - 1];

  // Trace Laplace transform under the two-point bias against its limit.
  {
    const int n = sec.get("widom_n", 256);
    const auto s = sec.get_list<double>("widom_s", {0.3, -0.2});
    const auto tt = sec.get_list<double>("widom_t", {0.1, 0.25});
    if (s.size() != tt.size()) throw InvalidArgument("testimate: widom_s and widom_t differ in length");
    TestimateParams w;
    w.beta1 = w.beta2 = sec.get("widom_beta", 1.0);
    w.theta = sec.get("widom_theta", 0.4);
    w.theta_prime = sec.get("widom_theta_prime", 2.2);
    std::map<int, cplx> pos;
    for (std::size_t j = 0; j < s.size(); ++j)
      pos[static_cast<int>(j + 1)] = cplx(s[j], tt[j]) / std::sqrt(static_cast<double>(j + 1));
    w.t_coeffs = real_laurent_family(pos);
    const auto r = ratio_vs_prediction(w, n);
    const double limit = widom_limit(s, tt, w.theta, w.theta_prime, w.beta1).real();
    const double rel = std::abs(r.exact_ratio / limit - 1.0);
    t.rows.push_back({"widom", std::to_string(n), fmt_double(r.exact_ratio), fmt_double(limit), fmt_double(rel)});
    out.notes.push_back("trace Laplace transform at N=" + std::to_string(n) + ": rel_err " + fmt_short(rel));
  }
  out.tables.push_back(std::move(t));
  const double last = errs.back();
  out.criteria.push_back(make_criterion(5, "exponential moment ratio", out.experiment, last, tol,
                                        decreasing && last < tol, sec, 300, "<"));
  out.criteria.back().note = std::string(decreasing ? "" : "NOT ") + "strictly decreasing in N";
  return out;
}

/// Two-singularity determinant over the product of one-point ones.
inline double two_point_ratio(double beta1, double beta2, double theta, double theta_prime, int n) {
  SymbolParams p;
  p.theta = theta;
  p.theta_prime = theta_prime;
  p.beta1 = beta1;
  p.beta2 = beta2;
  const double joint = log_det_of(build_symbol(p), n);
  const double one = log_det_of(single_singularity_symbol(beta1), n);
  const double two = beta2 == beta1 ? one : log_det_of(single_singularity_symbol(beta2), n);
  return std::exp(joint - one - two);
}

inline double wrap_positive(double a) {
  a = std::fmod(a, 2.0 * kPi);
  return a < 0.0 ? a + 2.0 * kPi : a;
}

inline ExperimentOutput exp_dik(const ExperimentConfig& cfg) {
  const auto sec = cfg.section("dik");
  const auto ns = sec.get_list<int>("n", {64, 128, 256});
  const double beta = sec.get("beta", 1.0);
  const auto ds = sec.get_list<double>("d", {kPi, kPi / 2.0, 1.0});
  const double theta = sec.get("theta", 0.3);
  const double tol = sec.get("rel_tolerance", 0.02);
  const int n_check = sec.get("n_check", 256);

  ExperimentOutput out;
  out.experiment = "dik";
  CsvTable t{"dik", {"N", "d", "ratio", "limit", "rel_err"}, {}};
  double worst = 0.0;
  bool checked = false;
  for (int n : ns)
    for (double d : ds) {
      const double tp = wrap_positive(theta + d);
      const double r = two_point_ratio(beta, beta, theta, tp, n);
      const double lim = dik_limit(beta, beta, theta, tp);
      const double rel = std::abs(r / lim - 1.0);
      if (n == n_check) {
        worst = std::max(worst, rel);
        checked = true;
      }
      t.rows.push_back({std::to_string(n), fmt_double(d), fmt_double(r), fmt_double(lim), fmt_double(rel)});
    }
  if (!checked) throw InvalidArgument("dik: n_check not in the N list");
  out.tables.push_back(std::move(t));
  out.criteria.push_back(make_criterion(6, "two-point decorrelation", out.experiment, worst, tol, worst < tol, sec, 180, "<"));
  return out;
}

inline ExperimentOutput exp_ck_scaling(const ExperimentConfig& cfg) {
  const auto sec = cfg.section("ck_scaling");
  const double beta = sec.get("beta", std::numbers::sqrt2);
  const int n = sec.get("n", 256);
  const double lo = sec.get("d_min_times_n", 8.0) / n;
  const double hi = sec.get("d_max", 0.25);
  const int points = sec.get("points", 9);
  const double tol = sec.get("slope_tolerance", 0.15);
  const double min_span = sec.get("min_span", 8.0);
  const double theta = sec.get("theta", 0.3);
  if (points < 5 || !(lo > 0.0 && hi > lo)) throw InvalidArgument("ck_scaling: bad d-grid");

  ExperimentOutput out;
  out.experiment = "ck_scaling";
  CsvTable t{"ck_scaling", {"d", "ratio"}, {}};
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < points; ++i) {
    const double d = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    const double r = two_point_ratio(beta, beta, theta, wrap_positive(theta + d), n);
    pts.emplace_back(d, r);
    t.rows.push_back({fmt_double(d), fmt_double(r)});
  }
  const auto fit = scaling_regression(pts, min_span);
  const double target = ck_target_slope(beta);
  const double dev = std::abs(fit.slope - target);
  out.tables.push_back(std::move(t));
  out.criteria.push_back(make_criterion(7, "merging-singularity slope", out.experiment, dev, tol, dev <= tol, sec, 300));
  out.criteria.back().note = "slope " + fmt_short(fit.slope) + " +- " + fmt_short(fit.std_error) + ", target " +
                             fmt_short(target) + "; value is |slope - target|";
  return out;
}

inline ExperimentOutput exp_logsum(const ExperimentConfig& cfg) {
  const auto sec = cfg.section("logsum");
  const int p_lo = sec.get("log2_m_min", 4);
  const int p_hi = sec.get("log2_m_max", 12);
  const int count = sec.get("d_count", 64);
  const double d_lo = sec.get("d_min", std::ldexp(1.0, -14));
  const double bound = sec.get("bound", 3.0);
  if (count < 2 || p_hi < p_lo || !(d_lo > 0.0 && d_lo < kPi)) throw InvalidArgument("logsum: bad grid");

  ExperimentOutput out;
  out.experiment = "logsum";
  CsvTable t{"logsum", {"M", "d", "sum", "remainder"}, {}};
  double worst = 0.0;
  for (int p = p_lo; p <= p_hi; ++p)
    for (int i = 0; i < count; ++i) {
      const double d = d_lo * std::pow(kPi / d_lo, static_cast<double>(i) / (count - 1));
      const auto r = logsum(1 << p, d);
      worst = std::max(worst, std::abs(r.remainder));
      t.rows.push_back({std::to_string(1 << p), fmt_double(d), fmt_double(r.sum), fmt_double(r.remainder)});
    }
  out.tables.push_back(std::move(t));
  out.criteria.push_back(make_criterion(8, "log-sum remainder", out.experiment, worst, bound, worst <= bound, sec, 30));
  return out;
}

inline ExperimentOutput exp_fyodorov_bouchaud(const ExperimentConfig& cfg) {
  const auto sec = cfg.section("fyodorov_bouchaud");
  const double beta = sec.get("beta", 1.0);
  const int n = sec.get("n", 64);
  const std::size_t draws = sec.get<std::size_t>("draws", 2000);
  const std::size_t ref_draws = sec.get<std::size_t>("reference_draws", 2000);
  const std::size_t grid = sec.get<std::size_t>("grid_size", 4096);
  const double p_min = sec.get("p_min", 0.01);
  const double z_tol = sec.get("z_tolerance", 4.0);

  const auto z = normalizer_exact(n, beta);
  const auto masses = parallel_map<MassSample>(draws, cfg.workers, [&](std::size_t i) {
    RngStream rs(cfg.seed, stream_id(9, i));
    return mass_from_field(field_on_grid(sample_cue(n, rs), grid, FieldMode::full()), beta, z);
  });
  std::vector<double> ref(ref_draws);
  for (std::size_t i = 0; i < ref_draws; ++i) {
    RngStream rs(cfg.seed, stream_id(9, kReferenceStreams | i));
    ref[i] = fb_sample(beta, rs);
  }
  std::vector<double> mv;
  CsvTable t{"fyodorov_bouchaud_masses", mass_csv_header(), {}};
  for (const auto& m : masses) {
    mv.push_back(m.mass);
    t.rows.push_back(mass_csv_row(m));
  }
  const auto ks = ks_test(EmpiricalLaw(mv, "chaos masses"), EmpiricalLaw(ref, "limit law draws"));
  const auto mean = estimate_mean(mv);
  const double zs = mean.z_score(1.0);

  ExperimentOutput out;
  out.experiment = "fyodorov_bouchaud";
  out.tables.push_back(std::move(t));
  CsvTable s{"fyodorov_bouchaud_summary", {"ks_statistic", "p_value", "mass_mean", "mass_se", "z"}, {}};
  s.rows.push_back({fmt_double(ks.statistic), fmt_double(ks.p_value), fmt_double(mean.mean),
                    fmt_double(mean.std_error), fmt_double(zs)});
  out.tables.push_back(std::move(s));
  out.criteria.push_back(make_criterion(9, "total-mass law", out.experiment, ks.p_value, p_min,
                                        ks.p_value > p_min && zs <= z_tol, sec, 600, ">"));
  out.criteria.back().note = "KS D=" + fmt_short(ks.statistic) + ", mass mean " + fmt_short(mean.mean) + " (|z|=" +
                             fmt_short(zs) + ", tol " + fmt_short(z_tol) + ")";
  return out;
}

inline ExperimentOutput exp_gaussian_reference(const ExperimentConfig& cfg) {
  const auto sec = cfg.section("gaussian_reference");
  const int m = sec.get("m", 32);
  const std::size_t draws = sec.get<std::size_t>("draws", 100000);
  const double beta = sec.get("beta", 1.0);
  const std::size_t grid = sec.get<std::size_t>("grid_size", 256);
  const auto angles = sec.get_list<double>("angles", {0.0, 0.5, 1.5, kPi});
  const double z_tol = sec.get("z_tolerance", 4.0);
  if (!(beta >= 0.0 && beta < 2.0)) throw InvalidArgument("gaussian_reference: beta must lie in [0, 2)");

  const auto z = gaussian_normalizer(m, beta);
  struct Row {
    std::vector<double> x;
    MassSample mass;
  };
  const auto rows = parallel_map<Row>(draws, cfg.workers, [&](std::size_t i) {
    RngStream rs(cfg.seed, stream_id(10, i));
    const auto d = sample_gaussian_draw(m, rs);
    Row r;
    for (double a : angles) r.x.push_back(gaussian_field_at(d, m, a));
    r.mass = mass_from_field(gaussian_field_from_draw(d, grid), beta, z);
    return r;
  });

  ExperimentOutput out;
  out.experiment = "gaussian_reference";
  CsvTable cov{"gaussian_covariance", {"a", "b", "estimate", "std_error", "target", "z"}, {}};
  CsvTable masses{"gaussian_masses", mass_csv_header(), {}};
  double worst = 0.0;
  std::vector<double> buf(draws);
  for (std::size_t a = 0; a < angles.size(); ++a)
    for (std::size_t b = a; b < angles.size(); ++b) {
      for (std::size_t i = 0; i < draws; ++i) buf[i] = rows[i].x[a] * rows[i].x[b];
      const auto est = estimate_mean(buf);
      const double target = covariance_sigma(m, angles[a] - angles[b]);
      const double zz = est.z_score(target);
      worst = std::max(worst, zz);
      cov.rows.push_back({fmt_double(angles[a]), fmt_double(angles[b]), fmt_double(est.mean),
                          fmt_double(est.std_error), fmt_double(target), fmt_double(zz)});
    }
  for (std::size_t i = 0; i < draws; ++i) {
    buf[i] = rows[i].mass.mass;
    masses.rows.push_back(mass_csv_row(rows[i].mass));
  }
  const auto mm = estimate_mean(buf);
  const double zm = mm.z_score(1.0);
  worst = std::max(worst, zm);
  out.tables.push_back(std::move(cov));
  out.tables.push_back(std::move(masses));
  out.criteria.push_back(make_criterion(10, "gaussian reference field", out.experiment, worst, z_tol, worst <= z_tol, sec, 120));
  out.criteria.back().note = "max |z| over covariance entries and mass mean (" + fmt_short(mm.mean) + ")";
  return out;
}

inline ExperimentOutput exp_decomposition(const ExperimentConfig& cfg) {
  const auto sec = cfg.section("decomposition");
  const int n = sec.get("n", 64);
  const double beta = sec.get("beta", 1.0);
  const double gamma = sec.get("gamma", 1.2);
  const double delta = sec.get("delta", 0.2);
  const int m = sec.get("m", 16);
  const auto ls = sec.get_list<int>("l", {2, 3, 4});
  const std::size_t draws = sec.get<std::size_t>("draws", 1000);
  const std::size_t grid = sec.get<std::size_t>("grid_size", 4096);
  const double tol = sec.get("reconstruction_tolerance", 1e-10);
  if (!(gamma > beta && gamma < 2.0)) throw InvalidArgument("decomposition: gamma must lie in (beta, 2)");
  if (!(beta > 0.0 && beta < 2.0)) throw InvalidArgument("decomposition: beta must lie in (0, 2)");

  const auto z = decomposition_normalizers(n, m, beta);
  const auto per_draw = parallel_map<std::vector<Decomposition>>(draws, cfg.workers, [&](std::size_t i) {
    RngStream rs(cfg.seed, stream_id(11, i));
    auto s = sample_cue(n, rs);
    std::vector<Decomposition> v;
    for (int l : ls) {
      BarrierSpec spec;
      spec.gamma = gamma;
      spec.l = l;
      v.push_back(decompose_mass(s, beta, spec, delta, m, TestFunction::one(), grid, z));
    }
    return v;
  });

  ExperimentOutput out;
  out.experiment = "decomposition";
  CsvTable summ{"decomposition_summary", {"l", "mean_abs_e1", "se_abs_e1", "mean_g", "mean_e2", "max_reconstruction_error"}, {}};
  double worst_rec = 0.0;
  std::vector<double> e1_means;
  for (std::size_t li = 0; li < ls.size(); ++li) {
    CsvTable rows{"decomposition_l" + std::to_string(ls[li]), mass_csv_header(), {}};
    std::vector<double> e1(draws), g(draws), e2(draws);
    double rec = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
      const auto& d = per_draw[i][li];
      e1[i] = std::abs(d.e1);
      g[i] = d.g;
      e2[i] = d.e2;
      rec = std::max(rec, d.reconstruction_error);
      MassSample ms;
      ms.key = {cfg.seed, stream_id(11, i)};
      ms.n = n;
      ms.m = m;
      ms.beta = beta;
      ms.grid_size = grid;
      ms.mass = d.total;
      ms.g = d.g;
      ms.e1 = d.e1;
      ms.e2 = d.e2;
      rows.rows.push_back(mass_csv_row(ms));
    }
    worst_rec = std::max(worst_rec, rec);
    const auto me1 = estimate_mean(e1);
    e1_means.push_back(me1.mean);
    summ.rows.push_back({std::to_string(ls[li]), fmt_double(me1.mean), fmt_double(me1.std_error),
                         fmt_double(estimate_mean(g).mean), fmt_double(estimate_mean(e2).mean), fmt_double(rec)});
    out.tables.push_back(std::move(rows));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < e1_means.size(); ++i) decreasing = decreasing && e1_means[i] < e1_means[i - 1];
  out.tables.push_back(std::move(summ));
  out.criteria.push_back(make_criterion(11, "mass decomposition", out.experiment, worst_rec, tol,
                                        worst_rec < tol && decreasing, sec, 300, "<"));
  out.criteria.back().note = std::string("E|E1| ") + (decreasing ? "" : "NOT ") + "strictly decreasing in l";
  return out;
}

inline ExperimentOutput exp_smoke(const ExperimentConfig& cfg) {
  const auto sec = cfg.section("smoke");
  const int n = sec.get("n", 8);
  const std::size_t draws = sec.get<std::size_t>("draws", 100);
  const double beta = sec.get("beta", 1.0);
  const std::size_t grid = sec.get<std::size_t>("grid_size", 1024);
  const auto z = normalizer_exact(n, beta);
  const auto masses = parallel_map<MassSample>(draws, cfg.workers, [&](std::size_t i) {
    RngStream rs(cfg.seed, stream_id(12, i));
    return mass_from_field(field_on_grid(sample_cue(n, rs), grid, FieldMode::full()), beta, z);
  });
  ExperimentOutput out;
  out.experiment = "smoke";
  CsvTable t{"smoke_masses", mass_csv_header(), {}};
  bool finite = true;
  for (const auto& m : masses) {
    finite = finite && std::isfinite(m.mass) && m.mass >= 0.0;
    t.rows.push_back(mass_csv_row(m));
  }
  out.tables.push_back(std::move(t));
  out.criteria.push_back(make_criterion(0, "smoke", out.experiment, finite ? 1.0 : 0.0, 1.0, finite, sec, 10, "=="));
  return out;
}

// ---------------------------------------------------------------------------

using ExperimentFn = std::function<ExperimentOutput(const ExperimentConfig&)>;

struct ExperimentEntry {
  std::string name;
  int criterion;
  std::string criterion_name;
  double default_budget_s;
  ExperimentFn fn;
};

inline const std::vector<ExperimentEntry>& experiment_registry() {
  static const std::vector<ExperimentEntry> r = {
      {"trace_moments", 1, "trace moments", 120, exp_trace_moments},
      {"heine_szego", 2, "heine-szego", 180, exp_heine_szego},
      {"det_identities", 3, "determinant identities", 60, exp_det_identities},
      {"diff_identity", 4, "differential identity", 60, exp_diff_identity},
      {"testimate", 5, "exponential moment ratio", 300, exp_testimate},
      {"dik", 6, "two-point decorrelation", 180, exp_dik},
      {"ck_scaling", 7, "merging-singularity slope", 300, exp_ck_scaling},
      {"logsum", 8, "log-sum remainder", 30, exp_logsum},
      {"fyodorov_bouchaud", 9, "total-mass law", 600, exp_fyodorov_bouchaud},
      {"gaussian_reference", 10, "gaussian reference field", 120, exp_gaussian_reference},
      {"decomposition", 11, "mass decomposition", 300, exp_decomposition},
      {"smoke", 0, "smoke", 10, exp_smoke},
  };
  return r;
}

/// Runs one named experiment. Numerical failures become FAIL rows with the
/// error text; unknown names throw.
inline ExperimentOutput run_experiment(const std::string& name, const ExperimentConfig& cfg) {
  cfg.validate();
  for (const auto& e : experiment_registry()) {
    if (e.name != name) continue;
    const auto start = std::chrono::steady_clock::now();
    ExperimentOutput out;
    try {
      out = e.fn(cfg);
    } catch (const std::exception& ex) {
      out = ExperimentOutput{};
      out.experiment = name;
      CriterionResult c;
      c.id = e.criterion;
      c.name = e.criterion_name;
      c.experiment = name;
      c.value = NAN;
      c.budget_s = cfg.section(name).get<double>("budget_s", e.default_budget_s);
      c.note = std::string("error: ") + ex.what();
      out.criteria.push_back(c);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (auto& c : out.criteria) c.runtime_s = secs;
    return out;
  }
  throw InvalidArgument("unknown experiment: " + name);
}

/// Experiments behind each CLI subcommand.
inline std::vector<std::string> subcommand_experiments(const std::string& sub) {
  static const std::map<std::string, std::vector<std::string>> m = {
      {"sample", {"trace_moments"}},
      {"toeplitz", {"heine_szego", "det_identities"}},
      {"diff-identity", {"diff_identity"}},
      {"verify-asymptotics", {"testimate", "dik", "logsum"}},
      {"ck-scaling", {"ck_scaling"}},
      {"fb-test", {"fyodorov_bouchaud"}},
      {"mass", {"gaussian_reference", "decomposition"}},
      {"smoke", {"smoke"}},
  };
  const auto it = m.find(sub);
  if (it == m.end()) throw InvalidArgument("unknown subcommand: " + sub);
  return it->second;
}

}  // namespace cuechaos
