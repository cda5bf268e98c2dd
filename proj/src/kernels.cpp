#include "ndsub/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace ndsub {

Eigen::MatrixXd expm(const EncodedChain& chain, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("expm: time must be >= 0");
  const auto n = static_cast<Eigen::Index>(chain.size());
  if (t == 0.0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd p = (chain.generator() * t).exp();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (p(i, j) < 0.0 && p(i, j) >= -1e-14) p(i, j) = 0.0;
    }
  }
  return p;
}

double letter_freq(const SubstitutionParams& params, Nucleotide letter) {
  const auto chain = build_nine_state(params);
  switch (letter) {
    case Nucleotide::A: return chain.mass(chain.select("*A"));
    case Nucleotide::G: return chain.mass(chain.select("*G"));
    case Nucleotide::C: return chain.mass(chain.select("C*"));
    case Nucleotide::T: return chain.mass(chain.select("T*"));
  }
  throw std::logic_error("bad nucleotide");
}

namespace {

double row_mass(const Eigen::MatrixXd& p, Eigen::Index a, const StateSet& w) {
  double s = 0.0;
  for (auto b : w) s += p(a, static_cast<Eigen::Index>(b));
  return s;
}

}  // namespace

double pair_freq_ancestor(const EncodedChain& chain, const Eigen::MatrixXd& transition,
                          const StateSet& w0, const StateSet& wt) {
  const auto& pi = chain.stationary();
  double f = 0.0;
  for (auto a : w0) {
    const auto i = static_cast<Eigen::Index>(a);
    f += pi(i) * row_mass(transition, i, wt);
  }
  return f;
}

double pair_freq_ancestor(const EncodedChain& chain, const StateSet& w0, const StateSet& wt,
                          double t) {
  return pair_freq_ancestor(chain, expm(chain, t), w0, wt);
}

double pair_freq_divergence(const EncodedChain& chain, const Eigen::MatrixXd& transition,
                            const StateSet& w1, const StateSet& w2) {
  const auto& pi = chain.stationary();
  double f = 0.0;
  for (Eigen::Index a = 0; a < pi.size(); ++a) {
    f += pi(a) * row_mass(transition, a, w1) * row_mass(transition, a, w2);
  }
  return f;
}

double pair_freq_divergence(const EncodedChain& chain, const StateSet& w1, const StateSet& w2,
                            double t) {
  return pair_freq_divergence(chain, expm(chain, t), w1, w2);
}

double pair_freq(Mode mode, const EncodedChain& chain, const StateSet& w1, const StateSet& w2,
                 double t) {
  return mode == Mode::Ancestor ? pair_freq_ancestor(chain, w1, w2, t)
                                : pair_freq_divergence(chain, w1, w2, t);
}

// ---------------------------------------------------------------------------

SpectralConstants SpectralConstants::jc_cpg(double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("CpG rate r must be >= 0");
  SpectralConstants k;
  k.r = r;
  const double d = 16.0 + 5.0 * r;
  k.u = std::sqrt(4.0 + 2.0 * r + r * r);
  k.u_plus = 6.0 + r + k.u;
  k.u_minus = 6.0 + r - k.u;
  k.v_plus = 10.0 + r + k.u;
  k.v_minus = 10.0 + r - k.u;

  k.c_0 = (3.0 + r) / (2.0 * d);
  const double c_scale = (3.0 + r) / (4.0 * k.u * d * d);
  const double c_even = k.u * (16.0 + 3.0 * r);
  const double c_odd = 32.0 + 14.0 * r + 3.0 * r * r;
  k.c_plus = c_scale * (c_even - c_odd);
  k.c_minus = c_scale * (c_even + c_odd);

  k.a_0 = (80.0 + 31.0 * r) / (32.0 * d);
  const double a_even = k.u * (256.0 + 128.0 * r + 13.0 * r * r);
  const double a_odd = 512.0 + 384.0 * r + 106.0 * r * r + 13.0 * r * r * r;
  const double a_scale = 1.0 / (64.0 * k.u * d * d);
  k.a_plus = a_scale * (a_even - a_odd);
  k.a_minus = a_scale * (a_even + a_odd);

  k.C_star = (4.0 + r) / d;
  k.A_star = (8.0 + 3.0 * r) / (2.0 * d);
  k.CG_star = 1.0 / d;
  return k;
}

ExponentialSum cc_closed_form_sum(double r) {
  const auto k = SpectralConstants::jc_cpg(r);
  const long double c_star = (4.0L + r) / (16.0L + 5.0L * r);
  return {c_star * c_star, {{4.0, k.c_0}, {k.u_plus, k.c_plus}, {k.u_minus, k.c_minus}}};
}

ExponentialSum aa_closed_form_sum(double r) {
  const auto k = SpectralConstants::jc_cpg(r);
  const long double a_star = (8.0L + 3.0L * r) / (2.0L * (16.0L + 5.0L * r));
  return {a_star * a_star, {{4.0, k.a_0}, {k.u_plus, k.a_plus}, {k.u_minus, k.a_minus}}};
}

double cc_closed_form(double r, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
  return cc_closed_form_sum(r).value(t);
}

double aa_closed_form(double r, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
  return aa_closed_form_sum(r).value(t);
}

double cc_closed_form_derivative(double r, double t) { return cc_closed_form_sum(r).derivative(t); }
double aa_closed_form_derivative(double r, double t) { return aa_closed_form_sum(r).derivative(t); }

// ---------------------------------------------------------------------------

double ExponentialSum::deviation(double t) const {
  std::complex<double> s = 0.0;
  for (const auto& term : terms) s += term.weight * std::exp(-term.rate * t);
  return s.real();
}

double ExponentialSum::derivative(double t) const {
  std::complex<double> s = 0.0;
  for (const auto& term : terms) s -= term.rate * term.weight * std::exp(-term.rate * t);
  return s.real();
}

ExponentialSum ExponentialSum::time_scaled(double factor) const {
  ExponentialSum out = *this;
  for (auto& term : out.terms) term.rate *= factor;
  return out;
}

ExponentialSum ExponentialSum::merged(double tol, double drop) const {
  ExponentialSum out{limit, {}};
  for (const auto& term : terms) {
    auto it = std::find_if(out.terms.begin(), out.terms.end(),
                           [&](const Term& o) { return std::abs(o.rate - term.rate) <= tol; });
    if (it == out.terms.end()) {
      out.terms.push_back(term);
    } else {
      it->weight += term.weight;
    }
  }
  std::erase_if(out.terms, [&](const Term& t) { return std::abs(t.weight) <= drop; });
  std::sort(out.terms.begin(), out.terms.end(),
            [](const Term& a, const Term& b) { return a.rate.real() < b.rate.real(); });
  return out;
}

namespace {

struct Eigensystem {
  Eigen::VectorXcd lambda;
  Eigen::MatrixXcd right;    // columns are right eigenvectors
  Eigen::MatrixXcd inverse;  // rows are the matching left eigenvectors
  Eigen::Index zero_mode = 0;
};

Eigensystem decompose(const EncodedChain& chain) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(chain.generator(), true);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  Eigensystem sys;
  sys.lambda = solver.eigenvalues();
  sys.right = solver.eigenvectors();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(sys.right);
  if (!lu.isInvertible()) throw std::runtime_error("generator is not diagonalizable");
  sys.inverse = lu.inverse();
  // Nearly parallel eigenvectors (close to a defective generator) make the
  // weights meaningless even when the LU succeeds.
  const double condition = sys.right.cwiseAbs().colwise().sum().maxCoeff() *
                           sys.inverse.cwiseAbs().colwise().sum().maxCoeff();
  if (!(condition < 1e8)) throw std::runtime_error("eigenvector basis is ill-conditioned");
  sys.lambda.cwiseAbs().minCoeff(&sys.zero_mode);
  return sys;
}

Eigen::VectorXcd indicator_coefficients(const Eigensystem& sys, const StateSet& w) {
  Eigen::VectorXcd h = Eigen::VectorXcd::Zero(sys.lambda.size());
  for (auto b : w) h += sys.inverse.col(static_cast<Eigen::Index>(b));
  return h;
}

}  // namespace

ExponentialSum ancestor_curve(const EncodedChain& chain, const StateSet& w0, const StateSet& wt) {
  const auto sys = decompose(chain);
  const auto& pi = chain.stationary();
  const auto h = indicator_coefficients(sys, wt);
  ExponentialSum out{static_cast<long double>(chain.mass(w0)) * chain.mass(wt), {}};
  for (Eigen::Index k = 0; k < sys.lambda.size(); ++k) {
    if (k == sys.zero_mode) continue;
    std::complex<double> left = 0.0;
    for (auto a : w0) left += pi(static_cast<Eigen::Index>(a)) * sys.right(static_cast<Eigen::Index>(a), k);
    out.terms.push_back({-sys.lambda(k), left * h(k)});
  }
  return out;
}

ExponentialSum divergence_curve(const EncodedChain& chain, const StateSet& w1, const StateSet& w2) {
  const auto sys = decompose(chain);
  const auto& pi = chain.stationary();
  const auto h1 = indicator_coefficients(sys, w1);
  const auto h2 = indicator_coefficients(sys, w2);
  ExponentialSum out{static_cast<long double>(chain.mass(w1)) * chain.mass(w2), {}};
  const auto n = sys.lambda.size();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == sys.zero_mode) continue;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == sys.zero_mode) continue;
      std::complex<double> overlap = 0.0;
      for (Eigen::Index a = 0; a < n; ++a) overlap += pi(a) * sys.right(a, j) * sys.right(a, k);
      out.terms.push_back({-(sys.lambda(j) + sys.lambda(k)), overlap * h1(j) * h2(k)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

JcCpgKernels::JcCpgKernels(double r)
    : r_(r), four_(build_four_state_jc(r)), six_(build_six_state_jc(r)) {
  four_c_ = four_.select("C*");
  four_cg_ = four_.select("CG");
  six_a_ = six_.select("*A");
  six_cg_ = six_.select("CG");
}

double JcCpgKernels::cc(double t) const { return pair_freq_ancestor(four_, four_c_, four_c_, t); }
double JcCpgKernels::aa(double t) const { return pair_freq_ancestor(six_, six_a_, six_a_, t); }
double JcCpgKernels::cc_div(double t) const { return pair_freq_divergence(four_, four_c_, four_c_, t); }
double JcCpgKernels::aa_div(double t) const { return pair_freq_divergence(six_, six_a_, six_a_, t); }

double JcCpgKernels::c_ctx(Mode mode, double t) const {
  return pair_freq(mode, four_, four_c_, four_cg_, t);
}

double JcCpgKernels::a_ctx(Mode mode, double t) const {
  return pair_freq(mode, six_, six_a_, six_cg_, t);
}

double JcCpgKernels::a_ctx_by_u_route(double t) const {
  const auto& pi6 = six_.stationary();
  Eigen::Vector4d u0(0.0, 0.0, pi6(static_cast<Eigen::Index>(six_.index_of("cA"))),
                     pi6(static_cast<Eigen::Index>(six_.index_of("CA"))));
  const Eigen::VectorXd ut = expm(four_, t).transpose() * u0;
  return ut(static_cast<Eigen::Index>(four_.index_of("CG")));
}

double JcCpgKernels::curve(Letter x, Mode mode, double t) const {
  if (x == Letter::C) return mode == Mode::Ancestor ? cc(t) : cc_div(t);
  return mode == Mode::Ancestor ? aa(t) : aa_div(t);
}

double DerivativeResiduals::max() const { return std::max({cc, aa, cc_div, aa_div}); }

DerivativeResiduals curve_derivative_identities(double r, double t, double step) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
  const JcCpgKernels k(r);
  const double c_star = k.four().mass(k.four().select("C*"));
  const double a_star = k.six().mass(k.six().select("*A"));

  auto diff = [&](auto&& f) {
    if (t >= step) return (f(t + step) - f(t - step)) / (2.0 * step);
    return (-3.0 * f(t) + 4.0 * f(t + step) - f(t + 2.0 * step)) / (2.0 * step);
  };

  DerivativeResiduals out;
  out.cc = std::abs(diff([&](double s) { return k.cc(s); }) -
                    (-4.0 * k.cc(t) - r * k.c_ctx(Mode::Ancestor, t) + c_star));
  out.aa = std::abs(diff([&](double s) { return k.aa(s); }) -
                    (-4.0 * k.aa(t) + r * k.a_ctx(Mode::Ancestor, t) + a_star));
  out.cc_div = std::abs(diff([&](double s) { return k.cc_div(s); }) -
                        (-8.0 * k.cc_div(t) - 2.0 * r * k.c_ctx(Mode::Divergence, t) + 2.0 * c_star));
  out.aa_div = std::abs(diff([&](double s) { return k.aa_div(s); }) -
                        (-8.0 * k.aa_div(t) + 2.0 * r * k.a_ctx(Mode::Divergence, t) + 2.0 * a_star));
  return out;
}

// ---------------------------------------------------------------------------

VarianceTerms variance_terms(const SubstitutionParams& params, Letter x, double t, Mode mode) {
  const auto nine = build_nine_state(params);
  const auto w3 = build_windowed(params, 3);
  const auto w4 = build_windowed(params, 4);
  const bool c = x == Letter::C;
  auto same = [&](const EncodedChain& chain, std::string_view pattern) {
    const auto w = chain.select(pattern);
    return pair_freq(mode, chain, w, w, t);
  };
  VarianceTerms terms;
  terms.pair = same(nine, c ? "C*" : "*A");
  terms.word2 = same(w3, c ? "CC*" : "*AA");
  terms.word3 = same(w4, c ? "C*C*" : "*A*A");
  return terms;
}

double sigma2_asymptotic(const VarianceTerms& v) {
  return v.pair + 2.0 * v.word2 + 2.0 * v.word3 - 5.0 * v.pair * v.pair;
}

double sigma2_asymptotic(const SubstitutionParams& params, Letter x, double t, Mode mode) {
  return sigma2_asymptotic(variance_terms(params, x, t, mode));
}

double sigma2_finite(const VarianceTerms& v, std::size_t n) {
  if (n < 2) throw std::invalid_argument("sigma2_finite needs N >= 2");
  const double nn = static_cast<double>(n);
  const double sq = v.pair * v.pair;
  return (v.pair - sq + 2.0 * (1.0 - 1.0 / nn) * (v.word2 - sq) +
          2.0 * (1.0 - 2.0 / nn) * (v.word3 - sq)) /
         nn;
}

double sigma2_finite(const SubstitutionParams& params, Letter x, double t, std::size_t n,
                     Mode mode) {
  return sigma2_finite(variance_terms(params, x, t, mode), n);
}

}  // namespace ndsub
