#include "ndsub/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ndsub/kernels.hpp"
#include "ndsub/studies.hpp"

namespace ndsub {

namespace {

constexpr double kRates[] = {0.0, 0.5, 1.0, 3.0, 10.0};

CheckResult at_most(std::string name, double value, double tolerance) {
  return {std::move(name), value, tolerance, true, value <= tolerance};
}

CheckResult above(std::string name, double value, double tolerance) {
  return {std::move(name), value, tolerance, false, value > tolerance};
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  return (a - b).cwiseAbs().maxCoeff();
}

double generator_defect(const EncodedChain& chain) {
  const auto g = check_generator(chain.generator());
  const double stationarity = (chain.stationary().transpose() * chain.generator()).cwiseAbs().maxCoeff();
  return std::max({g.max_row_sum, -g.min_off_diagonal, stationarity});
}

// Block map from `fine` onto `coarse` obtained by cutting each fine label down to
// the letters that coarse labels use: position p keeps fine[p] if coarse knows it,
// else the coarse symbol whose nucleotide set contains fine[p]'s.
std::vector<std::size_t> project(const EncodedChain& fine, const EncodedChain& coarse,
                                 const std::vector<int>& keep,
                                 const std::vector<PositionAlphabet>& from,
                                 const std::vector<PositionAlphabet>& to) {
  std::vector<std::size_t> block_of;
  for (const auto& label : fine.labels()) {
    std::string target;
    for (std::size_t p = 0; p < keep.size(); ++p) {
      const char c = label[static_cast<std::size_t>(keep[p])];
      const auto& src = from[static_cast<std::size_t>(keep[p])];
      const auto it = std::find_if(src.begin(), src.end(), [&](const auto& s) { return s.name == c; });
      const auto dst = std::find_if(to[p].begin(), to[p].end(), [&](const auto& s) {
        return (it->letters & ~s.letters) == 0;
      });
      target.push_back(dst->name);
    }
    block_of.push_back(coarse.index_of(target));
  }
  return block_of;
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& options) {
  std::vector<CheckResult> out;

  double defect = 0.0;
  for (double r : kRates) {
    defect = std::max({defect, generator_defect(build_four_state_jc(r)),
                       generator_defect(build_six_state_jc(r)),
                       generator_defect(build_nine_state(jc_cpg_params(r)))});
  }
  for (const auto& col : scan_grid_columns()) {
    defect = std::max(defect, generator_defect(build_nine_state(col.params)));
  }
  out.push_back(at_most("generator rows, signs and stationarity", defect, 1e-12));

  const TimeGrid coarse{0.0, 5.0, 0.05};
  double closed = 0.0, cc_div_gap = 0.0, u_route = 0.0;
  for (double r : kRates) {
    const JcCpgKernels k(r);
    for (double t : coarse.points()) {
      closed = std::max({closed, std::abs(cc_closed_form(r, t) - k.cc(t)),
                         std::abs(aa_closed_form(r, t) - k.aa(t))});
      cc_div_gap = std::max(cc_div_gap, std::abs(k.cc_div(t) - cc_closed_form(r, 2.0 * t)));
      u_route = std::max(u_route, std::abs(k.a_ctx_by_u_route(t) - k.a_ctx(Mode::Ancestor, t)));
    }
  }
  out.push_back(at_most("closed forms vs matrix exponential", closed, 1e-10));
  out.push_back(at_most("[C,C](t) = (C,C)(2t)", cc_div_gap, 1e-10));
  out.push_back(at_most("(*A,CG) through the 4-state adjoint system", u_route, 1e-10));

  const auto k0 = SpectralConstants::jc_cpg(0.0);
  const double r0 = std::max({std::abs(k0.c_plus), std::abs(k0.a_plus), std::abs(k0.c_0 - 3.0 / 32),
                              std::abs(k0.c_minus - 3.0 / 32), std::abs(k0.a_0 - 5.0 / 32),
                              std::abs(k0.a_minus - 1.0 / 32)});
  out.push_back(at_most("coefficients without CpG", r0, 1e-12));

  double balance = 0.0;
  for (double r : kRates) {
    auto four = build_four_state_jc(r);
    if (options.inject_fault) {
      Eigen::MatrixXd q = four.generator();
      q(1, 2) += 1e-3;
      q(1, 1) -= 1e-3;
      four = EncodedChain(four.labels(), q);
    }
    balance = std::max(balance, detailed_balance_residual(four));
  }
  out.push_back(at_most("detailed balance of the 4-state chain", balance, 1e-10));

  const auto six = build_six_state_jc(1.0);
  out.push_back(above("6-state cycle criterion broken at r=1",
                      kolmogorov_cycle_gap(six, {"CA", "CY", "CG"}), 1e-6));

  {
    const JcCpgKernels k(10.0);
    double gap = 0.0;
    for (double t : TimeGrid{0.0, 2.0, 0.01}.points()) {
      gap = std::max(gap, std::abs(k.aa_div(t) - aa_closed_form(10.0, 2.0 * t)));
    }
    out.push_back(above("[A,A](t) != (A,A)(2t) at r=10", gap, 1e-9));
  }

  double deriv = 0.0;
  for (double r : {0.0, 1.0, 10.0}) {
    for (double t : {0.1, 0.5, 1.0, 2.0}) deriv = std::max(deriv, curve_derivative_identities(r, t).max());
  }
  out.push_back(at_most("derivative identities", deriv, 1e-7));

  double nine_to_four = 0.0, nine_to_six = 0.0, window = 0.0;
  const auto nine_alpha = nine_state_encoding().positions;
  const auto four_alpha = four_state_encoding().positions;
  const auto six_alpha = six_state_encoding().positions;
  for (double r : kRates) {
    const auto nine = build_nine_state(jc_cpg_params(r));
    const auto four = build_four_state_jc(r);
    const auto sixr = build_six_state_jc(r);
    const auto to_four = lump(nine, project(nine, four, {0, 1}, nine_alpha, four_alpha), four.labels());
    const auto to_six = lump(nine, project(nine, sixr, {0, 1}, nine_alpha, six_alpha), sixr.labels());
    nine_to_four = std::max(nine_to_four, max_abs_diff(to_four.generator(), four.generator()));
    nine_to_six = std::max(nine_to_six, max_abs_diff(to_six.generator(), sixr.generator()));
  }
  for (const auto& col : scan_grid_columns()) {
    const auto nine = build_nine_state(col.params);
    const auto w3 = build_windowed(col.params, 3);
    const auto w3_alpha = windowed_encoding(3).positions;
    const auto lumped = lump(w3, project(w3, nine, {0, 1}, w3_alpha, nine_alpha), nine.labels());
    window = std::max(window, max_abs_diff(lumped.generator(), nine.generator()));
  }
  out.push_back(at_most("9-state lumps onto the 4-state chain", nine_to_four, 1e-12));
  out.push_back(at_most("9-state lumps onto the 6-state chain", nine_to_six, 1e-12));
  out.push_back(at_most("3-site window lumps onto the 9-state chain", window, 1e-12));
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const auto& c) { return c.passed; });
}

void write_validation_report(std::ostream& out, const std::vector<CheckResult>& results) {
  char buf[256];
  for (const auto& c : results) {
    std::snprintf(buf, sizeof buf, "%-4s %-48s %s %.3e (%s %.1e)\n", c.passed ? "PASS" : "FAIL",
                  c.name.c_str(), c.upper_bound ? "max residual" : "margin      ", c.value,
                  c.upper_bound ? "<=" : ">", c.tolerance);
    out << buf;
  }
}

}  // namespace ndsub
