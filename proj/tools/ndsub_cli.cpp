#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ndsub/alignment_io.hpp"
#include "ndsub/estimators.hpp"
#include "ndsub/studies.hpp"
#include "ndsub/validation.hpp"

namespace {

using namespace ndsub;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
  std::string params_path;
  std::optional<double> r;
  std::size_t n = 10000;
  std::optional<double> t;
  std::string mode = "ancestor";
  std::string letter;  // empty = every letter the rates support
  double epsilon = 0.05;
  std::uint64_t seed = 1;
  std::size_t replicates = 200;
  std::optional<double> burn_in;
  TimeGrid grid;
  std::string out;
  std::string alignment;
  bool inject_fault = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SubstitutionParams resolve_params(const RunConfig& cfg) {
  if (!cfg.params_path.empty()) return load_params(cfg.params_path);
  if (cfg.r) return jc_cpg_params(*cfg.r);
  throw UsageError("rates required: pass --params <file> or --r <value>");
}

Mode resolve_mode(const RunConfig& cfg) {
  auto mode = parse_mode(cfg.mode);
  if (!mode) throw UsageError("--mode must be 'ancestor' or 'divergence'");
  return *mode;
}

std::vector<Letter> resolve_letters(const RunConfig& cfg, const SubstitutionParams& params) {
  if (!cfg.letter.empty()) {
    auto x = parse_letter(cfg.letter);
    if (!x) throw UsageError("--letter must be 'C' or 'A'");
    return {*x};
  }
  if (params.jc_cpg_r()) return {Letter::C, Letter::A};
  return {Letter::C};
}

double required_t(const RunConfig& cfg) {
  if (!cfg.t) throw UsageError("--t is required");
  return *cfg.t;
}

// Writes to --out when given, otherwise to stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw std::invalid_argument("cannot open output file '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void add_params_options(CLI::App* cmd, RunConfig& cfg) {
  auto* file = cmd->add_option("--params", cfg.params_path, "parameter file (key = value)");
  auto* r = cmd->add_option("--r", cfg.r, "Jukes-Cantor + CpG intensity");
  file->excludes(r);
}

int cmd_simulate(const RunConfig& cfg) {
  ExperimentSpec spec;
  spec.params = resolve_params(cfg);
  spec.n = cfg.n;
  spec.t = required_t(cfg);
  spec.mode = resolve_mode(cfg);
  spec.seed = cfg.seed;
  spec.burn_in = cfg.burn_in ? *cfg.burn_in : default_burn_in(spec.params);
  spec.validate();

  const auto pair = run_experiment(spec);
  Output out(cfg.out);
  write_fasta(out.stream(), pair);
  const auto meta = metadata_line(spec);
  if (cfg.out.empty()) {
    std::cerr << meta << '\n';
  } else {
    std::ofstream sidecar(cfg.out + ".meta");
    if (!sidecar) throw std::invalid_argument("cannot write metadata next to '" + cfg.out + "'");
    sidecar << meta << '\n';
  }
  return kExitOk;
}

int cmd_estimate(const RunConfig& cfg) {
  const auto params = resolve_params(cfg);
  const auto mode = resolve_mode(cfg);
  if (cfg.alignment.empty()) throw UsageError("alignment file required");
  const auto pair = load_fasta(cfg.alignment, mode);
  const auto stats = observe(pair);

  Output out(cfg.out);
  auto& os = out.stream();
  std::vector<std::string> lines;
  for (auto x : resolve_letters(cfg, params)) {
    const auto e = TimeEstimator(params, x, mode).estimate(stats, cfg.epsilon);
    os << "# letter " << to_char(x) << ", " << to_string(mode) << " mode, N=" << e.n
       << ": T = " << e.t;
    if (e.ci_available) {
      os << ", " << 100.0 * (1.0 - e.epsilon) << "% interval [" << e.ci_low << ", " << e.ci_high
         << "]\n";
    } else {
      os << ", interval unavailable (kappa=" << e.kappa << ", nu=" << e.nu << ")\n";
    }
    lines.push_back(estimate_csv_line(e));
  }
  os << estimate_csv_header() << '\n';
  for (const auto& line : lines) os << line << '\n';
  return kExitOk;
}

int cmd_curve(const RunConfig& cfg) {
  const auto params = resolve_params(cfg);
  const auto rows = curve_table(params, cfg.grid);
  Output out(cfg.out);
  write_curve_csv(out.stream(), rows);
  return kExitOk;
}

int cmd_scan(const RunConfig& cfg) {
  Output out(cfg.out);
  auto& os = out.stream();
  auto columns = scan_grid_columns();
  for (auto& c : scan_jc_baselines()) columns.push_back(std::move(c));

  std::size_t total = 0;
  os << "column,points,cc_violations,aa_div_violations,cc_max_slope,aa_div_max_slope\n";
  char buf[256];
  for (const auto& col : columns) {
    const auto res = scan_monotonicity(col, cfg.grid);
    total += res.violations();
    std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%zu,%.6g,%.6g\n", res.name.c_str(), res.points,
                  res.cc_violations, res.aa_violations, res.cc_steepest_tail, res.aa_steepest_tail);
    os << buf;
  }
  std::cerr << (total == 0 ? "no strict-decrease violations found\n"
                           : std::to_string(total) + " strict-decrease violations\n");
  return total == 0 ? kExitOk : kExitFailed;
}

int cmd_coverage(const RunConfig& cfg) {
  CoverageConfig cc;
  cc.params = resolve_params(cfg);
  cc.n = cfg.n;
  cc.t = required_t(cfg);
  cc.mode = resolve_mode(cfg);
  cc.letters = resolve_letters(cfg, cc.params);
  cc.epsilon = cfg.epsilon;
  cc.replicates = cfg.replicates;
  cc.seed = cfg.seed;
  cc.burn_in = cfg.burn_in ? *cfg.burn_in : default_burn_in(cc.params);

  Output out(cfg.out);
  auto& os = out.stream();
  os << "letter,mode,replicates,coverage,out_of_range,ci_unavailable,mean_T,sd_T,predicted_sd,"
        "studentized_skew,studentized_excess_kurtosis\n";
  char buf[512];
  for (const auto& s : run_coverage(cc)) {
    std::snprintf(buf, sizeof buf, "%c,%s,%zu,%.12g,%zu,%zu,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  to_char(s.letter), to_string(s.mode), s.replicates, s.coverage, s.out_of_range,
                  s.ci_unavailable, s.mean_t, s.sd_t, s.predicted_sd, s.studentized_skew,
                  s.studentized_excess_kurtosis);
    os << buf;
  }
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg) {
  const auto results = run_validation({cfg.inject_fault});
  Output out(cfg.out);
  write_validation_report(out.stream(), results);
  return all_passed(results) ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neighbour-dependent substitution toolkit: simulation, decay curves and time estimates"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_grid = [&](CLI::App* cmd, double t_max) {
    cfg.grid.t_max = t_max;
    cmd->add_option("--t-min", cfg.grid.t_min, "first grid time")->capture_default_str();
    cmd->add_option("--t-max", cfg.grid.t_max, "last grid time")->capture_default_str();
    cmd->add_option("--step", cfg.grid.step, "grid step")->capture_default_str();
  };

  auto* simulate = app.add_subcommand("simulate", "simulate an aligned pair and write FASTA");
  add_params_options(simulate, cfg);
  simulate->add_option("--n", cfg.n, "sites")->capture_default_str();
  simulate->add_option("--t", cfg.t, "branch length");
  simulate->add_option("--mode", cfg.mode, "ancestor|divergence")->capture_default_str();
  simulate->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  simulate->add_option("--burn-in", cfg.burn_in, "burn-in time (default depends on rates)");
  simulate->add_option("--out", cfg.out, "FASTA path; metadata goes to <out>.meta");

  auto* estimate = app.add_subcommand("estimate", "estimate elapsed time from an alignment");
  add_params_options(estimate, cfg);
  estimate->add_option("alignment", cfg.alignment, "two-record FASTA")->required();
  estimate->add_option("--mode", cfg.mode, "ancestor|divergence")->capture_default_str();
  estimate->add_option("--letter", cfg.letter, "C|A (default: all supported)");
  estimate->add_option("--epsilon", cfg.epsilon, "interval level")->capture_default_str();
  estimate->add_option("--out", cfg.out, "report path");

  auto* curve = app.add_subcommand("curve", "tabulate pair-frequency curves");
  add_params_options(curve, cfg);
  add_grid(curve, 5.0);
  curve->add_option("--out", cfg.out, "CSV path");

  auto* scan = app.add_subcommand("scan", "monotonicity scan over the RN + YpR parameter grid");
  add_grid(scan, 5.0);
  scan->add_option("--out", cfg.out, "report path");

  auto* coverage = app.add_subcommand("coverage", "Monte Carlo coverage of confidence intervals");
  add_params_options(coverage, cfg);
  coverage->add_option("--n", cfg.n, "sites")->capture_default_str();
  coverage->add_option("--t", cfg.t, "true time");
  coverage->add_option("--mode", cfg.mode, "ancestor|divergence")->capture_default_str();
  coverage->add_option("--letter", cfg.letter, "C|A (default: all supported)");
  coverage->add_option("--epsilon", cfg.epsilon, "interval level")->capture_default_str();
  coverage->add_option("--replicates", cfg.replicates, "replicate count")->capture_default_str();
  coverage->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  coverage->add_option("--burn-in", cfg.burn_in, "burn-in time (default depends on rates)");
  coverage->add_option("--out", cfg.out, "report path");

  auto* validate = app.add_subcommand("validate", "run the invariant suite");
  validate->add_option("--out", cfg.out, "report path");
  validate->add_flag("--inject-fault", cfg.inject_fault, "perturb a generator entry")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(cfg);
    if (*estimate) return cmd_estimate(cfg);
    if (*curve) return cmd_curve(cfg);
    if (*scan) return cmd_scan(cfg);
    if (*coverage) return cmd_coverage(cfg);
    if (*validate) return cmd_validate(cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
