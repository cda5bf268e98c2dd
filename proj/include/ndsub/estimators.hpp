#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "ndsub/kernels.hpp"
#include "ndsub/simd/count_kernels.hpp"
#include "ndsub/simulator.hpp"

namespace ndsub {

/// Observation lies outside the range a curve can explain: above (x)* or at or
/// below (x)*^2, where the sequence is too short or divergence is saturated.
class ObsOutOfRange : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InvalidLetter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Frequencies are exact ratios k/N. They are kept in extended precision so that
// curves can be inverted far into their flat tails.
using Frequency = long double;

struct LetterStats {
  Frequency letter = 0;   // (x) on the left sequence
  Frequency pair = 0;     // (x,x) or [x,x]
  Frequency word2 = 0;    // (xx,xx)
  Frequency word3 = 0;    // (x*x,x*x)
  Frequency context = 0;  // (C*,CG) for C, (*A,CG) for A
};

/// Empirical frequencies of an alignment, counted with circular indexing.
struct ObservedStats {
  std::size_t n = 0;
  Mode mode = Mode::Ancestor;
  LetterStats c;
  LetterStats a;
  // Extra terms of the RN slope estimator.
  Frequency pair_ca = 0, pair_ct = 0, pair_cg = 0;
  Frequency ctx_c_ta = 0, ctx_c_tg = 0, ctx_c_ca = 0;

  const LetterStats& of(Letter x) const { return x == Letter::C ? c : a; }
};

ObservedStats observe(const AlignedPair& pair, simd::Isa isa = simd::active_isa());
ObservedStats stats_from_counts(const simd::AlignmentCounts& counts, std::size_t n, Mode mode);

struct KappaNu {
  double kappa = 0.0;
  double nu = 0.0;
};

/// Slope and variance plug-ins under Jukes-Cantor + CpG with intensity r. The
/// mode is taken from the stats; divergence doubles kappa.
KappaNu kappa_nu(const ObservedStats& stats, double r, Letter x);
/// Throws std::invalid_argument unless params are Jukes-Cantor + CpG.
KappaNu kappa_nu(const ObservedStats& stats, const SubstitutionParams& params, Letter x);

/// nu = (x,x) - 5 (x,x)^2 + 2 (xx,xx) + 2 (x*x,x*x), identical in both modes.
double nu_obs(const ObservedStats& stats, Letter x);

/// Slope plug-in for T_C under general RN + YpR rates (single-branch form).
double kappa_rn(const ObservedStats& stats, const SubstitutionParams& params);

/// Solves curve(t) = obs for a decreasing curve with curve(0) = x_star and limit
/// x_star^2. Bisection to 1e-12 in t on [0, T_MAX], where T_MAX doubles from 1
/// while curve(T_MAX) >= obs, up to 2^10.
double invert_curve(const std::function<long double(double)>& curve, long double obs,
                    long double x_star);

/// z with P(|Z| >= z) = epsilon for a standard normal Z; 0 < epsilon < 1.
double normal_quantile(double epsilon);

/// (x,x)(t) in ancestor mode or [x,x](t) in divergence mode as an exponential
/// sum. Jukes-Cantor + CpG uses the closed forms (and the six-state chain for
/// [A,A]); other rates use the nine-state chain.
ExponentialSum pair_curve(const SubstitutionParams& params, Letter x, Mode mode);

struct TimeEstimate {
  Letter letter = Letter::C;
  Mode mode = Mode::Ancestor;
  std::size_t n = 0;
  double t = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double kappa = 0.0;
  double nu = 0.0;
  double epsilon = 0.05;
  /// False when kappa <= 0 or nu <= 0; the bounds then collapse onto t.
  bool ci_available = false;

  double half_width() const { return 0.5 * (ci_high - ci_low); }
  bool covers(double truth) const { return ci_available && ci_low <= truth && truth <= ci_high; }
};

/// Estimator for one letter and mode. Builds the decay curve once so that many
/// alignments can be processed cheaply.
class TimeEstimator {
 public:
  /// General RN + YpR rates support only letter C (throws InvalidLetter otherwise).
  TimeEstimator(const SubstitutionParams& params, Letter x, Mode mode);

  Letter letter() const { return letter_; }
  Mode mode() const { return mode_; }
  const ExponentialSum& curve() const { return curve_; }
  long double x_star() const { return x_star_; }

  double invert(long double obs) const;
  TimeEstimate estimate(const ObservedStats& stats, double epsilon) const;

 private:
  SubstitutionParams params_;
  std::optional<double> jc_r_;
  Letter letter_;
  Mode mode_;
  ExponentialSum curve_;
  long double x_star_ = 0;
};

/// The pair's mode tag must equal `mode`.
TimeEstimate estimate_time(const AlignedPair& pair, const SubstitutionParams& params, Letter x,
                           Mode mode, double epsilon);

const char* estimate_csv_header();
/// letter,mode,N,T,ci_low,ci_high,kappa,nu,epsilon with 12 significant digits;
/// unavailable bounds print as nan.
std::string estimate_csv_line(const TimeEstimate& estimate);

}  // namespace ndsub
