#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ndsub/estimators.hpp"

namespace ndsub {

// --- curve table ---------------------------------------------------------------

struct TimeGrid {
  double t_min = 0.0;
  double t_max = 5.0;
  double step = 0.01;

  /// t_min + k * step for every k with the point at most t_max (plus rounding slack).
  std::vector<double> points() const;
  void validate() const;
};

struct CurveRow {
  double t = 0.0;
  double cc = 0.0;      // (C,C)(t)
  double aa = 0.0;      // (A,A)(t)
  double cc_div = 0.0;  // [C,C](t)
  double aa_div = 0.0;  // [A,A](t)
  double aa_gap = 0.0;  // [A,A](t) - (A,A)(2t)
};

/// Jukes-Cantor + CpG rates use the 4- and 6-state chains; other rates the nine-state one.
std::vector<CurveRow> curve_table(const SubstitutionParams& params, const TimeGrid& grid);
void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows);

// --- monotonicity scan ------------------------------------------------------------

struct ScanColumn {
  std::string name;
  SubstitutionParams params;
};

/// The seven RN + YpR parameter columns of the monotonicity scan.
std::vector<ScanColumn> scan_grid_columns();
/// Jukes-Cantor + CpG at r in {0, 0.5, 1, 3, 10}.
std::vector<ScanColumn> scan_jc_baselines();

struct ScanResult {
  std::string name;
  std::size_t points = 0;
  std::size_t cc_violations = 0;  // grid steps where (C,C) fails to strictly decrease
  std::size_t aa_violations = 0;  // same for [A,A]
  double cc_steepest_tail = 0.0;  // largest (closest to 0) derivative seen on the grid
  double aa_steepest_tail = 0.0;

  std::size_t violations() const { return cc_violations + aa_violations; }
};

/// Checks strict decrease of (C,C)(t) and [A,A](t) on the nine-state chain.
/// Differences are taken on the decaying part of each curve, so that tails far
/// below the limit's rounding error still register.
ScanResult scan_monotonicity(const ScanColumn& column, const TimeGrid& grid);

// --- coverage study -----------------------------------------------------------------

struct CoverageConfig {
  SubstitutionParams params;
  std::size_t n = 10000;
  double t = 0.2;
  Mode mode = Mode::Ancestor;
  std::vector<Letter> letters{Letter::C, Letter::A};
  double epsilon = 0.05;
  std::size_t replicates = 200;
  std::uint64_t seed = 1;
  double burn_in = 5.0;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct CoverageSummary {
  Letter letter = Letter::C;
  Mode mode = Mode::Ancestor;
  std::size_t replicates = 0;
  std::size_t covered = 0;
  std::size_t out_of_range = 0;     // replicates whose observation could not be inverted
  std::size_t ci_unavailable = 0;   // kappa or nu not positive
  double coverage = 0.0;
  double mean_t = 0.0;
  double sd_t = 0.0;
  double predicted_sd = 0.0;        // sigma / (|curve'(t)| sqrt(N)) from the kernels
  double studentized_skew = 0.0;    // of kappa sqrt(N / nu) (T - t)
  double studentized_excess_kurtosis = 0.0;
};

std::vector<CoverageSummary> run_coverage(const CoverageConfig& config);

/// Population standard deviation of an estimate: sigma_x(t) / (|curve'(t)| sqrt(N)).
double predicted_estimate_sd(const SubstitutionParams& params, Letter x, Mode mode, double t,
                             std::size_t n);

// --- sample moments -------------------------------------------------------------------

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skew = 0.0;
  double excess_kurtosis = 0.0;
};
Moments sample_moments(const std::vector<double>& xs);

}  // namespace ndsub
