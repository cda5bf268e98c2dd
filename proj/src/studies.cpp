#include "ndsub/studies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

namespace ndsub {

std::vector<double> TimeGrid::points() const {
  validate();
  std::vector<double> out;
  const double slack = 1e-9 * step;
  for (std::size_t k = 0;; ++k) {
    const double t = t_min + static_cast<double>(k) * step;
    if (t > t_max + slack) break;
    out.push_back(t);
  }
  return out;
}

void TimeGrid::validate() const {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be > 0");
  if (!(t_min >= 0.0) || !(t_max >= t_min)) {
    throw std::invalid_argument("grid needs 0 <= t_min <= t_max");
  }
}

// ---------------------------------------------------------------------------

std::vector<CurveRow> curve_table(const SubstitutionParams& params, const TimeGrid& grid) {
  params.validate();
  const auto ts = grid.points();
  std::vector<CurveRow> rows;
  rows.reserve(ts.size());

  if (auto r = params.jc_cpg_r()) {
    const JcCpgKernels k(*r);
    for (double t : ts) {
      CurveRow row{t, cc_closed_form(*r, t), aa_closed_form(*r, t), k.cc_div(t), k.aa_div(t), 0.0};
      row.aa_gap = row.aa_div - aa_closed_form(*r, 2.0 * t);
      rows.push_back(row);
    }
    return rows;
  }

  const auto nine = build_nine_state(params);
  const auto c = nine.select("C*");
  const auto a = nine.select("*A");
  for (double t : ts) {
    const auto p = expm(nine, t);
    CurveRow row{t,
                 pair_freq_ancestor(nine, p, c, c),
                 pair_freq_ancestor(nine, p, a, a),
                 pair_freq_divergence(nine, p, c, c),
                 pair_freq_divergence(nine, p, a, a),
                 0.0};
    row.aa_gap = row.aa_div - pair_freq_ancestor(nine, a, a, 2.0 * t);
    rows.push_back(row);
  }
  return rows;
}

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << "t,CC,AA,CC_div,AA_div,AA_div_minus_AA2t\n";
  char buf[256];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", row.t, row.cc, row.aa,
                  row.cc_div, row.aa_div, row.aa_gap);
    out << buf;
  }
}

// ---------------------------------------------------------------------------

std::vector<ScanColumn> scan_grid_columns() {
  using N = Nucleotide;
  using M = YprMove;
  auto base = [](double v, double w) {
    SubstitutionParams p;
    p.v.fill(v);
    p.w.fill(w);
    return p;
  };
  auto all_ypr = [](SubstitutionParams p, double rate) {
    p.ypr.fill(rate);
    return p;
  };
  auto set4 = [](std::array<double, 4>& dst, double a, double t, double c, double g) {
    dst[index(N::A)] = a;
    dst[index(N::T)] = t;
    dst[index(N::C)] = c;
    dst[index(N::G)] = g;
  };

  std::vector<ScanColumn> cols;
  cols.push_back({"jc-cpg-r10", jc_cpg_params(10.0)});

  auto kimura = base(1.0, 3.0);
  kimura.rate(M::CG2CA) = kimura.rate(M::CG2TG) = 10.0;
  cols.push_back({"kimura-cpg-w3", kimura});

  auto kimura_low = base(1.0, 0.3);
  kimura_low.rate(M::CG2CA) = kimura_low.rate(M::CG2TG) = 10.0;
  cols.push_back({"kimura-cpg-w0.3", kimura_low});

  cols.push_back({"all-ypr-10", all_ypr(base(1.0, 0.3), 10.0)});
  cols.push_back({"all-ypr-0.3", all_ypr(base(1.0, 3.0), 0.3)});

  SubstitutionParams mixed;
  set4(mixed.v, 1.0, 2.0, 1.0, 2.0);
  set4(mixed.w, 3.0, 6.0, 3.0, 6.0);
  mixed.rate(M::CG2CA) = 10.0;
  mixed.rate(M::TA2CA) = 5.0;
  mixed.rate(M::CA2CG) = 3.0;
  mixed.rate(M::TG2CG) = 1.0;
  mixed.rate(M::CG2TG) = 10.0;
  mixed.rate(M::TA2TG) = 5.0;
  mixed.rate(M::CA2TA) = 3.0;
  mixed.rate(M::TG2TA) = 1.0;
  cols.push_back({"asymmetric-1", mixed});

  SubstitutionParams skewed;
  set4(skewed.v, 1.0, 0.3, 2.0, 10.0);
  set4(skewed.w, 3.0, 1.0, 1.0, 0.1);
  skewed.rate(M::CG2CA) = 10.0;
  skewed.rate(M::TA2CA) = 1.0;
  skewed.rate(M::CA2CG) = 20.0;
  skewed.rate(M::TG2CG) = 0.3;
  skewed.rate(M::CG2TG) = 5.0;
  skewed.rate(M::TA2TG) = 0.5;
  skewed.rate(M::CA2TA) = 3.0;
  skewed.rate(M::TG2TA) = 0.1;
  cols.push_back({"asymmetric-2", skewed});
  return cols;
}

std::vector<ScanColumn> scan_jc_baselines() {
  std::vector<ScanColumn> cols;
  for (double r : {0.0, 0.5, 1.0, 3.0, 10.0}) {
    char name[32];
    std::snprintf(name, sizeof name, "jc-cpg-r%g", r);
    cols.push_back({name, jc_cpg_params(r)});
  }
  return cols;
}

namespace {

struct DecreaseCheck {
  std::size_t violations = 0;
  double flattest = -std::numeric_limits<double>::infinity();
};

DecreaseCheck check_decrease(const ExponentialSum& curve, const std::vector<double>& ts) {
  DecreaseCheck out;
  double prev = curve.deviation(ts.front());
  out.flattest = curve.derivative(ts.front());
  for (std::size_t i = 1; i < ts.size(); ++i) {
    const double cur = curve.deviation(ts[i]);
    if (!(cur < prev)) ++out.violations;
    out.flattest = std::max(out.flattest, curve.derivative(ts[i]));
    prev = cur;
  }
  return out;
}

}  // namespace

ScanResult scan_monotonicity(const ScanColumn& column, const TimeGrid& grid) {
  const auto ts = grid.points();
  ScanResult out;
  out.name = column.name;
  out.points = ts.size();
  if (ts.size() < 2) return out;
  const auto cc = check_decrease(pair_curve(column.params, Letter::C, Mode::Ancestor), ts);
  const auto aa = check_decrease(pair_curve(column.params, Letter::A, Mode::Divergence), ts);
  out.cc_violations = cc.violations;
  out.aa_violations = aa.violations;
  out.cc_steepest_tail = cc.flattest;
  out.aa_steepest_tail = aa.flattest;
  return out;
}

// ---------------------------------------------------------------------------

void CoverageConfig::validate() const {
  params.validate();
  if (n < Sequence::kMinLength) throw std::invalid_argument("N must be >= 3");
  if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
  if (replicates < 1) throw std::invalid_argument("replicate count must be >= 1");
  if (letters.empty()) throw std::invalid_argument("no letters requested");
  normal_quantile(epsilon);
}

Moments sample_moments(const std::vector<double>& xs) {
  Moments m;
  const double n = static_cast<double>(xs.size());
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = xs.size() > 1 ? m2 * n / (n - 1.0) : 0.0;
  if (m2 > 0.0) {
    m.skew = m3 / std::pow(m2, 1.5);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

double predicted_estimate_sd(const SubstitutionParams& params, Letter x, Mode mode, double t,
                             std::size_t n) {
  const double slope = pair_curve(params, x, mode).derivative(t);
  const double sigma2 = sigma2_asymptotic(params, x, t, mode);
  return std::sqrt(sigma2 / static_cast<double>(n)) / std::abs(slope);
}

namespace {

struct ReplicateOutcome {
  bool ok = false;
  TimeEstimate estimate;
};

}  // namespace

std::vector<CoverageSummary> run_coverage(const CoverageConfig& config) {
  config.validate();
  std::vector<TimeEstimator> estimators;
  for (auto x : config.letters) estimators.emplace_back(config.params, x, config.mode);

  const std::size_t reps = config.replicates;
  const std::size_t letters = estimators.size();
  std::vector<ReplicateOutcome> outcomes(reps * letters);

  ExperimentSpec spec;
  spec.params = config.params;
  spec.n = config.n;
  spec.t = config.t;
  spec.mode = config.mode;
  spec.burn_in = config.burn_in;
  spec.seed = config.seed;

  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t k = first; k < reps; k += stride) {
      const auto stats = observe(run_experiment(spec, k));
      for (std::size_t j = 0; j < letters; ++j) {
        auto& slot = outcomes[k * letters + j];
        try {
          slot.estimate = estimators[j].estimate(stats, config.epsilon);
          slot.ok = true;
        } catch (const ObsOutOfRange&) {
          slot.ok = false;
        }
      }
    }
  };

  unsigned threads = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(reps)));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work, i, threads);
  }

  std::vector<CoverageSummary> out;
  for (std::size_t j = 0; j < letters; ++j) {
    CoverageSummary s;
    s.letter = config.letters[j];
    s.mode = config.mode;
    s.replicates = reps;
    std::vector<double> ts, studentized;
    for (std::size_t k = 0; k < reps; ++k) {
      const auto& o = outcomes[k * letters + j];
      if (!o.ok) {
        ++s.out_of_range;
        continue;
      }
      ts.push_back(o.estimate.t);
      if (!o.estimate.ci_available) {
        ++s.ci_unavailable;
        continue;
      }
      if (o.estimate.covers(config.t)) ++s.covered;
      studentized.push_back(o.estimate.kappa *
                            std::sqrt(static_cast<double>(config.n) / o.estimate.nu) *
                            (o.estimate.t - config.t));
    }
    s.coverage = static_cast<double>(s.covered) / static_cast<double>(reps);
    const auto mt = sample_moments(ts);
    s.mean_t = mt.mean;
    s.sd_t = std::sqrt(mt.variance);
    s.predicted_sd = predicted_estimate_sd(config.params, s.letter, config.mode, config.t, config.n);
    const auto ms = sample_moments(studentized);
    s.studentized_skew = ms.skew;
    s.studentized_excess_kurtosis = ms.excess_kurtosis;
    out.push_back(s);
  }
  return out;
}

}  // namespace ndsub
