#include "ndsub/estimators.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

namespace ndsub {

namespace {

std::vector<std::uint8_t> padded_codes(const Sequence& seq) {
  const std::size_t n = seq.size();
  std::vector<std::uint8_t> codes(n + 2);
  for (std::size_t i = 0; i < n; ++i) codes[i] = static_cast<std::uint8_t>(index(seq[i]));
  codes[n] = codes[0];
  codes[n + 1] = codes[1];
  return codes;
}

}  // namespace

ObservedStats stats_from_counts(const simd::AlignmentCounts& k, std::size_t n, Mode mode) {
  if (n < Sequence::kMinLength) throw std::invalid_argument("observed stats need N >= 3");
  const Frequency nn = static_cast<Frequency>(n);
  auto f = [&](std::uint64_t count) { return static_cast<Frequency>(count) / nn; };
  ObservedStats s;
  s.n = n;
  s.mode = mode;
  s.c = {f(k.letter_c), f(k.pair_cc), f(k.word2_cc), f(k.word3_cc), f(k.ctx_c_cg)};
  s.a = {f(k.letter_a), f(k.pair_aa), f(k.word2_aa), f(k.word3_aa), f(k.ctx_a_cg)};
  s.pair_ca = f(k.pair_ca);
  s.pair_ct = f(k.pair_ct);
  s.pair_cg = f(k.pair_cg);
  s.ctx_c_ta = f(k.ctx_c_ta);
  s.ctx_c_tg = f(k.ctx_c_tg);
  s.ctx_c_ca = f(k.ctx_c_ca);
  return s;
}

ObservedStats observe(const AlignedPair& pair, simd::Isa isa) {
  pair.validate();
  const auto left = padded_codes(pair.left);
  const auto right = padded_codes(pair.right);
  return stats_from_counts(simd::count_alignment(left, right, pair.size(), isa), pair.size(),
                           pair.mode);
}

double nu_obs(const ObservedStats& stats, Letter x) {
  const auto& s = stats.of(x);
  return static_cast<double>(s.pair - 5 * s.pair * s.pair + 2 * s.word2 + 2 * s.word3);
}

KappaNu kappa_nu(const ObservedStats& stats, double r, Letter x) {
  const auto& s = stats.of(x);
  const long double rr = r;
  long double kappa = x == Letter::C ? 4 * s.pair + rr * s.context - s.letter
                                     : 4 * s.pair - rr * s.context - s.letter;
  if (stats.mode == Mode::Divergence) kappa *= 2;
  return {static_cast<double>(kappa), nu_obs(stats, x)};
}

KappaNu kappa_nu(const ObservedStats& stats, const SubstitutionParams& params, Letter x) {
  const auto r = params.jc_cpg_r();
  if (!r) throw std::invalid_argument("kappa_nu expects Jukes-Cantor + CpG rates");
  return kappa_nu(stats, *r, x);
}

double kappa_rn(const ObservedStats& s, const SubstitutionParams& p) {
  using N = Nucleotide;
  const long double v_c = p.v_of(N::C);
  const long double w_c = p.w_of(N::C);
  const long double stay = static_cast<long double>(p.v_of(N::A)) + p.w_of(N::T) + p.v_of(N::G);
  const long double kappa = -v_c * s.pair_ca - w_c * s.pair_ct + stay * s.c.pair - v_c * s.pair_cg -
                            p.rate(YprMove::TA2CA) * s.ctx_c_ta -
                            p.rate(YprMove::TG2CG) * s.ctx_c_tg +
                            p.rate(YprMove::CA2TA) * s.ctx_c_ca +
                            p.rate(YprMove::CG2TG) * s.c.context;
  return static_cast<double>(kappa);
}

double invert_curve(const std::function<long double(double)>& curve, long double obs,
                    long double x_star) {
  if (obs > x_star) throw ObsOutOfRange("observed frequency exceeds the stationary letter frequency");
  if (obs <= x_star * x_star) {
    throw ObsOutOfRange("observed frequency at or below its saturation level; sequence too short "
                        "or divergence saturated");
  }
  if (curve(0.0) <= obs) return 0.0;

  constexpr double kMaxBracket = 1024.0;
  constexpr double kTolerance = 1e-12;
  double lo = 0.0, hi = 1.0;
  while (curve(hi) >= obs) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxBracket) throw ObsOutOfRange("observation not reached before t = 1024");
  }
  while (hi - lo > kTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (curve(mid) > obs ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double normal_quantile(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  return std::sqrt(2.0) * boost::math::erfc_inv(epsilon);
}

// ---------------------------------------------------------------------------

namespace {

ExponentialSum jc_curve(double r, Letter x, Mode mode) {
  if (x == Letter::C) {
    auto c = cc_closed_form_sum(r);
    return mode == Mode::Ancestor ? c : c.time_scaled(2.0);
  }
  auto a = aa_closed_form_sum(r);
  if (mode == Mode::Ancestor) return a;
  // Without CpG the process is reversible and [A,A](t) = (A,A)(2t).
  if (r == 0.0) return a.time_scaled(2.0);
  const auto six = build_six_state_jc(r);
  const auto w = six.select("*A");
  auto curve = divergence_curve(six, w, w).merged(1e-9, 0.0);
  curve.limit = a.limit;
  return curve;
}

}  // namespace

ExponentialSum pair_curve(const SubstitutionParams& params, Letter x, Mode mode) {
  if (auto r = params.jc_cpg_r()) return jc_curve(*r, x, mode);
  const auto nine = build_nine_state(params);
  const auto w = nine.select(x == Letter::C ? "C*" : "*A");
  return (mode == Mode::Ancestor ? ancestor_curve(nine, w, w) : divergence_curve(nine, w, w))
      .merged(1e-9, 0.0);
}

TimeEstimator::TimeEstimator(const SubstitutionParams& params, Letter x, Mode mode)
    : params_(params), jc_r_(params.jc_cpg_r()), letter_(x), mode_(mode) {
  params_.validate();
  if (jc_r_) {
    curve_ = jc_curve(*jc_r_, x, mode);
    const long double r = *jc_r_;
    x_star_ = x == Letter::C ? (4.0L + r) / (16.0L + 5.0L * r)
                             : (8.0L + 3.0L * r) / (2.0L * (16.0L + 5.0L * r));
    return;
  }
  if (x != Letter::C) {
    throw InvalidLetter("only letter C has a time estimator under general RN + YpR rates");
  }
  curve_ = pair_curve(params_, x, mode);
  x_star_ = static_cast<long double>(letter_freq(params_, Nucleotide::C));
}

double TimeEstimator::invert(long double obs) const {
  return invert_curve([this](double t) { return curve_.value_extended(t); }, obs, x_star_);
}

TimeEstimate TimeEstimator::estimate(const ObservedStats& stats, double epsilon) const {
  if (stats.mode != mode_) throw std::invalid_argument("observed stats were counted in another mode");
  const double z = normal_quantile(epsilon);

  TimeEstimate e;
  e.letter = letter_;
  e.mode = mode_;
  e.n = stats.n;
  e.epsilon = epsilon;
  e.t = invert(stats.of(letter_).pair);
  if (jc_r_) {
    const auto kn = kappa_nu(stats, *jc_r_, letter_);
    e.kappa = kn.kappa;
    e.nu = kn.nu;
  } else {
    e.kappa = kappa_rn(stats, params_) * (mode_ == Mode::Divergence ? 2.0 : 1.0);
    e.nu = nu_obs(stats, letter_);
  }
  e.ci_available = e.kappa > 0.0 && e.nu > 0.0;
  e.ci_low = e.ci_high = e.t;
  if (e.ci_available) {
    const double half = z * std::sqrt(e.nu / static_cast<double>(stats.n)) / e.kappa;
    e.ci_low = e.t - half;
    e.ci_high = e.t + half;
  }
  return e;
}

TimeEstimate estimate_time(const AlignedPair& pair, const SubstitutionParams& params, Letter x,
                           Mode mode, double epsilon) {
  if (pair.mode != mode) throw std::invalid_argument("alignment mode tag differs from requested mode");
  return TimeEstimator(params, x, mode).estimate(observe(pair), epsilon);
}

const char* estimate_csv_header() { return "letter,mode,N,T,ci_low,ci_high,kappa,nu,epsilon"; }

std::string estimate_csv_line(const TimeEstimate& e) {
  char buf[512];
  const double nan = std::nan("");
  std::snprintf(buf, sizeof buf, "%c,%s,%zu,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g",
                to_char(e.letter), to_string(e.mode), e.n, e.t, e.ci_available ? e.ci_low : nan,
                e.ci_available ? e.ci_high : nan, e.kappa, e.nu, e.epsilon);
  return buf;
}

}  // namespace ndsub
