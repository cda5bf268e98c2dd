#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ndsub/encoded_chain.hpp"

namespace ndsub {

// --- matrix exponential and pair frequencies -------------------------------

/// Transition matrix exp(t Q). Entries above -1e-14 that come out negative are
/// clamped to zero. Throws std::invalid_argument for t < 0.
Eigen::MatrixXd expm(const EncodedChain& chain, double t);

/// Stationary frequency of a single letter, from the nine-state chain.
double letter_freq(const SubstitutionParams& params, Nucleotide letter);

/// (W0, Wt)(t): site in W0 at time 0 and in Wt at time t, stationary start.
double pair_freq_ancestor(const EncodedChain& chain, const StateSet& w0, const StateSet& wt,
                          double t);
double pair_freq_ancestor(const EncodedChain& chain, const Eigen::MatrixXd& transition,
                          const StateSet& w0, const StateSet& wt);

/// [W1, W2](t): two independent branches of length t from a stationary ancestor.
double pair_freq_divergence(const EncodedChain& chain, const StateSet& w1, const StateSet& w2,
                            double t);
double pair_freq_divergence(const EncodedChain& chain, const Eigen::MatrixXd& transition,
                            const StateSet& w1, const StateSet& w2);

double pair_freq(Mode mode, const EncodedChain& chain, const StateSet& w1, const StateSet& w2,
                 double t);

// --- closed forms for Jukes-Cantor + CpG ------------------------------------

struct SpectralConstants {
  double r = 0.0;
  double u = 0.0, u_plus = 0.0, u_minus = 0.0;
  double v_plus = 0.0, v_minus = 0.0;
  double c_0 = 0.0, c_plus = 0.0, c_minus = 0.0;
  double a_0 = 0.0, a_plus = 0.0, a_minus = 0.0;
  double C_star = 0.0, A_star = 0.0;
  double CG_star = 0.0;

  static SpectralConstants jc_cpg(double r);
};

double cc_closed_form(double r, double t);
double aa_closed_form(double r, double t);
double cc_closed_form_derivative(double r, double t);
double aa_closed_form_derivative(double r, double t);

// --- exponential sums --------------------------------------------------------

/// f(t) = limit + Re sum_k weight_k exp(-rate_k t). Keeping the decay apart from
/// the limit lets tails be evaluated without cancellation. The limit is held in
/// extended precision so that limit + deviation still resolves far tails.
struct ExponentialSum {
  struct Term {
    std::complex<double> rate;
    std::complex<double> weight;
  };

  long double limit = 0.0L;
  std::vector<Term> terms;

  double value(double t) const { return static_cast<double>(value_extended(t)); }
  long double value_extended(double t) const { return limit + deviation(t); }
  double deviation(double t) const;
  double derivative(double t) const;

  /// Same curve with time rescaled, g(t) = f(factor * t).
  ExponentialSum time_scaled(double factor) const;

  /// Terms merged by rate (|rate difference| <= tol), dropping merged weights
  /// below `drop`. Sorted by real part of the rate.
  ExponentialSum merged(double tol = 1e-7, double drop = 0.0) const;
};

/// (W0, Wt)(t) as an exponential sum, from an eigendecomposition of the generator.
ExponentialSum ancestor_curve(const EncodedChain& chain, const StateSet& w0, const StateSet& wt);

/// [W1, W2](t) as an exponential sum; rates are sums of pairs of eigenvalues.
ExponentialSum divergence_curve(const EncodedChain& chain, const StateSet& w1, const StateSet& w2);

ExponentialSum cc_closed_form_sum(double r);
ExponentialSum aa_closed_form_sum(double r);

// --- Jukes-Cantor + CpG kernel bundle -----------------------------------------

/// The 4- and 6-state chains of one r with the state sets the curves need.
class JcCpgKernels {
 public:
  explicit JcCpgKernels(double r);

  double r() const { return r_; }
  const EncodedChain& four() const { return four_; }
  const EncodedChain& six() const { return six_; }

  double cc(double t) const;           // (C,C)(t) via expm on the 4-state chain
  double aa(double t) const;           // (A,A)(t) via expm on the 6-state chain
  double cc_div(double t) const;       // [C,C](t)
  double aa_div(double t) const;       // [A,A](t)
  double c_ctx(Mode mode, double t) const;  // (C*,CG)(t) or [C*,CG](t)
  double a_ctx(Mode mode, double t) const;  // (*A,CG)(t) or [*A,CG](t)

  /// (*A,CG)(t) through U' = Q^T U on the 4-state chain, U(0) = (0,0,(cA)*,(CA)*).
  double a_ctx_by_u_route(double t) const;

  double curve(Letter x, Mode mode, double t) const;

 private:
  double r_;
  EncodedChain four_;
  EncodedChain six_;
  StateSet four_c_;     // C*
  StateSet four_cg_;    // CG
  StateSet six_a_;      // *A
  StateSet six_cg_;     // CG
};

struct DerivativeResiduals {
  double cc = 0.0;
  double aa = 0.0;
  double cc_div = 0.0;
  double aa_div = 0.0;

  double max() const;
};

/// |central difference - ODE right-hand side| for the four curve identities.
DerivativeResiduals curve_derivative_identities(double r, double t, double step = 1e-5);

// --- variance ----------------------------------------------------------------

/// The four pair frequencies entering the variance of (x,x)_obs or [x,x]_obs.
struct VarianceTerms {
  double pair = 0.0;     // (x,x)
  double word2 = 0.0;    // (xx,xx)
  double word3 = 0.0;    // (x*x,x*x)
};

VarianceTerms variance_terms(const SubstitutionParams& params, Letter x, double t,
                             Mode mode = Mode::Ancestor);

/// sigma_x^2(t) = (x,x) + 2(xx,xx) + 2(x*x,x*x) - 5 (x,x)^2.
double sigma2_asymptotic(const SubstitutionParams& params, Letter x, double t,
                         Mode mode = Mode::Ancestor);
double sigma2_asymptotic(const VarianceTerms& terms);

/// Variance of the observed frequency over N sites (N >= 2).
double sigma2_finite(const SubstitutionParams& params, Letter x, double t, std::size_t n,
                     Mode mode = Mode::Ancestor);
double sigma2_finite(const VarianceTerms& terms, std::size_t n);

}  // namespace ndsub
