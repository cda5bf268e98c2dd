// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ndsub/estimators.hpp"
#include "ndsub/studies.hpp"
#include "ndsub/validation.hpp"
#include "test_support.hpp"

using namespace ndsub;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = budget_s <= 0.0 || secs < budget_s;
  const bool ok = o.passed && in_time;
  if (!ok) ++failures;
  std::printf("%s %2d %s: %s [%.2f s%s]\n", ok ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs,
              in_time ? "" : ", over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

const std::vector<double> kRs = {0.0, 0.5, 1.0, 3.0, 10.0};

std::vector<double> grid(double hi, double step) { return TimeGrid{0.0, hi, step}.points(); }

ExperimentSpec spec_for(const SubstitutionParams& p, std::size_t n, double t, std::uint64_t seed) {
  ExperimentSpec s;
  s.params = p;
  s.n = n;
  s.t = t;
  s.seed = seed;
  s.burn_in = default_burn_in(p);
  return s;
}

Outcome closed_form_fidelity() {
  double worst = 0.0;
  for (double r : kRs) {
    const JcCpgKernels k(r);
    for (double t : grid(5.0, 0.01)) {
      worst = std::max(worst, std::abs(cc_closed_form(r, t) - k.cc(t)));
      worst = std::max(worst, std::abs(aa_closed_form(r, t) - k.aa(t)));
    }
  }
  return {worst <= 1e-10, fmt("max |closed - expm| = %.3g (tol 1e-10)", worst)};
}

Outcome zero_cpg_reduction() {
  const auto s = SpectralConstants::jc_cpg(0.0);
  const double coef = std::max({std::abs(s.c_plus), std::abs(s.a_plus), std::abs(s.c_0 - 3.0 / 32),
                                std::abs(s.c_minus - 3.0 / 32), std::abs(s.a_0 - 5.0 / 32),
                                std::abs(s.a_minus - 1.0 / 32)});
  // Classical Jukes-Cantor: a letter survives to time t with probability 1/4 + 3/4 e^{-4t}.
  double kernel = 0.0;
  for (double t : grid(5.0, 0.01)) {
    const double jc = 0.25 * (0.25 + 0.75 * std::exp(-4.0 * t));
    kernel = std::max({kernel, std::abs(cc_closed_form(0.0, t) - jc), std::abs(aa_closed_form(0.0, t) - jc)});
  }
  return {coef <= 1e-12 && kernel <= 1e-12,
          fmt("max coefficient error %.3g, max vs JC kernel %.3g (tol 1e-12)", coef, kernel)};
}

Outcome reversibility() {
  double balance = 0.0, cc_gap = 0.0, aa_gap = 0.0;
  for (double r : kRs) {
    const JcCpgKernels k(r);
    balance = std::max(balance, detailed_balance_residual(k.four()));
    for (double t : grid(5.0, 0.01)) cc_gap = std::max(cc_gap, std::abs(k.cc_div(t) - k.cc(2.0 * t)));
  }
  const double cycle = kolmogorov_cycle_gap(build_six_state_jc(1.0), {"CA", "CY", "CG"});
  const JcCpgKernels k10(10.0);
  for (double t : grid(5.0, 0.01)) aa_gap = std::max(aa_gap, std::abs(k10.aa_div(t) - k10.aa(2.0 * t)));
  const bool ok = balance <= 1e-10 && cc_gap <= 1e-10 && cycle > 1e-6 && aa_gap > 1e-9;
  return {ok, fmt("balance %.3g, max|[C,C]-(C,C)(2t)| %.3g, cycle margin %.3g, max|[A,A]-(A,A)(2t)| %.3g",
                  balance, cc_gap, cycle, aa_gap)};
}

Outcome derivative_identities() {
  double worst = 0.0;
  for (double r : {0.0, 1.0, 10.0})
    for (double t : {0.1, 0.5, 1.0, 2.0}) worst = std::max(worst, curve_derivative_identities(r, t).max());
  return {worst <= 1e-7, fmt("max residual %.3g (tol 1e-7)", worst)};
}

Outcome nine_state_transcription() {
  double lump_err = -1.0;
  for (const auto& c : run_validation())
    if (c.name == "9-state lumps onto the 4-state chain") lump_err = c.value;
  const double r = 10.0, t = 0.3;
  const std::size_t n = 100000;
  const auto p = jc_cpg_params(r);
  const auto nine = build_nine_state(p);
  const auto c = nine.select("C*");
  const double analytic = ancestor_curve(nine, c, c).value(t);
  const auto stats = observe(run_experiment(spec_for(p, n, t, 501)));
  const double se = std::sqrt(sigma2_finite(p, Letter::C, t, n));
  const double z = (static_cast<double>(stats.c.pair) - analytic) / se;
  const bool ok = lump_err >= 0.0 && lump_err <= 1e-12 && std::abs(z) <= 3.0;
  return {ok, fmt("lumping residual %.3g (tol 1e-12), simulated (C,C) at %.2f SE", lump_err, z)};
}

Outcome simulator_exactness() {
  const double r = 10.0, t = 0.3;
  const std::size_t n = 100000;
  const auto p = jc_cpg_params(r);
  const JcCpgKernels k(r);
  const auto pair = run_experiment(spec_for(p, n, t, 601));
  const auto stats = observe(pair);
  const double z_cc = (static_cast<double>(stats.c.pair) - k.cc(t)) / std::sqrt(sigma2_finite(p, Letter::C, t, n));
  const double z_aa = (static_cast<double>(stats.a.pair) - k.aa(t)) / std::sqrt(sigma2_finite(p, Letter::A, t, n));
  // No closed variance for the context frequency: sample autocovariances up to lag 3.
  std::vector<int> ind(n);
  using testing::matches;
  for (std::size_t i = 0; i < n; ++i)
    ind[i] = matches(pair.left, i, Nucleotide::C) && matches(pair.right, i, Nucleotide::C) &&
             matches(pair.right, i + 1, Nucleotide::G);
  const double z_ctx = (static_cast<double>(stats.c.context) - k.c_ctx(Mode::Ancestor, t)) /
                       testing::dependent_se(ind, 3);
  const bool ok = std::abs(z_cc) <= 3.0 && std::abs(z_aa) <= 3.0 && std::abs(z_ctx) <= 3.0;
  return {ok, fmt("z: (C,C) %.2f, (A,A) %.2f, (C*,CG) %.2f (limit 3)", z_cc, z_aa, z_ctx)};
}

Outcome variance_formula() {
  const double r = 10.0, t = 0.3;
  const std::size_t n = 1000, reps = 500;
  const auto p = jc_cpg_params(r);
  const auto spec = spec_for(p, n, t, 701);
  std::vector<double> xs;
  xs.reserve(reps);
  for (std::size_t k = 0; k < reps; ++k) xs.push_back(static_cast<double>(observe(run_experiment(spec, k)).c.pair));
  const double empirical = sample_moments(xs).variance;
  const double predicted = sigma2_finite(p, Letter::C, t, n);
  const double rel = std::abs(empirical - predicted) / predicted;
  return {rel <= 0.10, fmt("empirical %.4g vs predicted %.4g, relative error %.3f (tol 0.10)", empirical,
                           predicted, rel)};
}

std::string coverage_detail(const std::vector<CoverageSummary>& all) {
  std::string out;
  for (const auto& s : all) {
    if (!out.empty()) out += ", ";
    out += std::string(1, to_char(s.letter)) + (s.mode == Mode::Ancestor ? "" : "~") +
           fmt(" %.3f", s.coverage);
  }
  return out + " (band [0.91, 0.99])";
}

bool in_band(const std::vector<CoverageSummary>& all) {
  return std::all_of(all.begin(), all.end(), [](const CoverageSummary& s) {
    return s.coverage >= 0.91 && s.coverage <= 0.99;
  });
}

Outcome jc_coverage() {
  std::vector<CoverageSummary> all;
  for (Mode mode : {Mode::Ancestor, Mode::Divergence}) {
    CoverageConfig cfg;
    cfg.params = jc_cpg_params(10.0);
    cfg.n = 10000;
    cfg.t = 0.2;
    cfg.mode = mode;
    cfg.epsilon = 0.05;
    cfg.replicates = 200;
    cfg.seed = mode == Mode::Ancestor ? 801 : 802;
    for (const auto& s : run_coverage(cfg)) all.push_back(s);
  }
  return {all.size() == 4 && in_band(all), coverage_detail(all)};
}

Outcome rn_estimator() {
  const auto cols = scan_grid_columns();
  const auto it = std::find_if(cols.begin(), cols.end(), [](const ScanColumn& c) { return c.name == "kimura-cpg-w3"; });
  CoverageConfig cfg;
  cfg.params = it->params;
  cfg.n = 10000;
  cfg.t = 0.2;
  cfg.letters = {Letter::C};
  cfg.replicates = 200;
  cfg.seed = 901;
  const auto cov = run_coverage(cfg);

  std::mt19937_64 rng(902);
  double worst = 0.0;
  for (double r : kRs) {
    for (int k = 0; k < 50; ++k) {
      const auto s = observe({testing::random_sequence(300, rng), testing::random_sequence(300, rng), Mode::Ancestor});
      worst = std::max(worst, std::abs(kappa_rn(s, jc_cpg_params(r)) - kappa_nu(s, r, Letter::C).kappa));
    }
  }
  return {in_band(cov) && worst <= 1e-14,
          coverage_detail(cov) + fmt("; max |kappa_RN - kappa_C| %.3g (tol 1e-14)", worst)};
}

Outcome monotonicity_scan() {
  std::string detail;
  std::size_t total = 0;
  for (const auto& col : scan_grid_columns()) {
    const auto res = scan_monotonicity(col, TimeGrid{0.0, 5.0, 0.01});
    total += res.violations();
    if (!detail.empty()) detail += ", ";
    detail += col.name + "=" + std::to_string(res.cc_violations) + "/" + std::to_string(res.aa_violations);
  }
  return {total == 0, "violations (C,C)/[A,A]: " + detail};
}

Outcome round_trip() {
  double worst = 0.0;
  for (double r : {0.5, 1.0, 10.0})
    for (Letter x : {Letter::C, Letter::A})
      for (Mode mode : {Mode::Ancestor, Mode::Divergence}) {
        const TimeEstimator est(jc_cpg_params(r), x, mode);
        for (double t : TimeGrid{0.01, 3.0, 0.01}.points())
          worst = std::max(worst, std::abs(est.invert(est.curve().value_extended(t)) - t));
      }
  return {worst <= 1e-9, fmt("max |T - t| %.3g (tol 1e-9)", worst)};
}

}  // namespace

int main() {
  std::printf("SIMD counting kernel: %s\n", simd::to_string(simd::active_isa()));
  criterion(1, "closed-form fidelity", 10, closed_form_fidelity);
  criterion(2, "r=0 reduction", 0, zero_cpg_reduction);
  criterion(3, "reversibility dichotomy", 5, reversibility);
  criterion(4, "derivative identities", 5, derivative_identities);
  criterion(5, "nine-state transcription", 0, nine_state_transcription);
  criterion(6, "simulator exactness", 30, simulator_exactness);
  criterion(7, "variance formula", 120, variance_formula);
  criterion(8, "JC+CpG interval coverage", 300, jc_coverage);
  criterion(9, "RN+YpR estimator", 0, rn_estimator);
  criterion(10, "monotonicity scan", 30, monotonicity_scan);
  criterion(11, "round-trip inversion", 0, round_trip);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
