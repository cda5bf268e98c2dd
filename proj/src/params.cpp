#include "ndsub/params.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace ndsub {
namespace {

constexpr std::array<std::string_view, kYprMoveCount> kYprKeys = {
    "rCG2CA", "rCG2TG", "rTA2CA", "rTA2TG", "rCA2CG", "rCA2TA", "rTG2CG", "rTG2TA"};

constexpr std::array<std::string_view, 4> kVKeys = {"v_A", "v_T", "v_C", "v_G"};
constexpr std::array<std::string_view, 4> kWKeys = {"w_A", "w_T", "w_C", "w_G"};

using enum Nucleotide;

// YpR move in which the purine `x` (right of pyrimidine `left`) becomes `y`.
YprMove right_member_move(Nucleotide left, Nucleotide x) {
  if (left == C) return x == G ? YprMove::CG2CA : YprMove::CA2CG;
  return x == A ? YprMove::TA2TG : YprMove::TG2TA;
}

// YpR move in which the pyrimidine `x` (left of purine `right`) becomes `y`.
YprMove left_member_move(Nucleotide x, Nucleotide right) {
  if (right == G) return x == C ? YprMove::CG2TG : YprMove::TG2CG;
  return x == C ? YprMove::CA2TA : YprMove::TA2CA;
}

std::string trim(const std::string& s) {
  auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string_view ypr_key(YprMove move) { return kYprKeys[static_cast<std::size_t>(move)]; }

void SubstitutionParams::validate() const {
  auto check = [](double x, std::string_view name, bool strict) {
    if (!std::isfinite(x) || x < 0.0 || (strict && x == 0.0)) {
      throw std::invalid_argument(std::string(name) + (strict ? " must be > 0" : " must be >= 0") +
                                  ", got " + std::to_string(x));
    }
  };
  for (std::size_t i = 0; i < 4; ++i) {
    check(v[i], kVKeys[i], true);
    check(w[i], kWKeys[i], false);
  }
  for (std::size_t i = 0; i < kYprMoveCount; ++i) check(ypr[i], kYprKeys[i], false);
}

std::optional<double> SubstitutionParams::jc_cpg_r() const {
  auto ones = [](const std::array<double, 4>& a) {
    return std::all_of(a.begin(), a.end(), [](double x) { return x == 1.0; });
  };
  if (!ones(v) || !ones(w)) return std::nullopt;
  const double r = rate(YprMove::CG2CA);
  if (rate(YprMove::CG2TG) != r) return std::nullopt;
  for (std::size_t i = 2; i < kYprMoveCount; ++i) {
    if (ypr[i] != 0.0) return std::nullopt;
  }
  return r;
}

SubstitutionParams jc_cpg_params(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("CpG rate r must be finite and >= 0");
  }
  SubstitutionParams p;
  p.rate(YprMove::CG2CA) = r;
  p.rate(YprMove::CG2TG) = r;
  return p;
}

double site_rate(const SubstitutionParams& params, Nucleotide left, Nucleotide x,
                 Nucleotide right, Nucleotide y) {
  if (x == y) throw std::invalid_argument("site_rate: source and target nucleotide coincide");
  double rate = is_purine(x) == is_purine(y) ? params.w_of(y) : params.v_of(y);
  if (is_pyrimidine(left) && is_purine(x) && is_purine(y)) {
    rate += params.rate(right_member_move(left, x));
  }
  if (is_purine(right) && is_pyrimidine(x) && is_pyrimidine(y)) {
    rate += params.rate(left_member_move(x, right));
  }
  return rate;
}

double total_site_rate(const SubstitutionParams& params, Nucleotide left, Nucleotide x,
                       Nucleotide right) {
  double total = 0.0;
  for (auto y : kNucleotides) {
    if (y != x) total += site_rate(params, left, x, right, y);
  }
  return total;
}

double max_total_site_rate(const SubstitutionParams& params) {
  double best = 0.0;
  for (auto l : kNucleotides)
    for (auto x : kNucleotides)
      for (auto r : kNucleotides) best = std::max(best, total_site_rate(params, l, x, r));
  return best;
}

SubstitutionParams parse_params(std::istream& in) {
  std::map<std::string, double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    auto key = trim(line.substr(0, eq));
    auto text = trim(line.substr(eq + 1));
    double value = 0.0;
    std::istringstream ss(text);
    if (!(ss >> value) || !(ss >> std::ws).eof()) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": bad number '" + text + "'");
    }
    if (!values.emplace(key, value).second) {
      throw std::invalid_argument("duplicate key '" + key + "'");
    }
  }

  auto take = [&](std::string_view key) -> std::optional<double> {
    auto it = values.find(std::string(key));
    if (it == values.end()) return std::nullopt;
    double v = it->second;
    values.erase(it);
    return v;
  };

  SubstitutionParams p;
  if (auto r = take("jc_cpg_r")) {
    if (!values.empty()) {
      throw std::invalid_argument("jc_cpg_r conflicts with explicit key '" + values.begin()->first +
                                  "'");
    }
    return jc_cpg_params(*r);
  }
  for (std::size_t i = 0; i < 4; ++i) {
    auto vv = take(kVKeys[i]);
    auto ww = take(kWKeys[i]);
    if (!vv || !ww) {
      throw std::invalid_argument("missing key '" +
                                  std::string(vv ? kWKeys[i] : kVKeys[i]) + "'");
    }
    p.v[i] = *vv;
    p.w[i] = *ww;
  }
  for (std::size_t i = 0; i < kYprMoveCount; ++i) p.ypr[i] = take(kYprKeys[i]).value_or(0.0);
  if (!values.empty()) {
    throw std::invalid_argument("unknown key '" + values.begin()->first + "'");
  }
  p.validate();
  return p;
}

SubstitutionParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open parameter file '" + path + "'");
  return parse_params(in);
}

void write_params(std::ostream& out, const SubstitutionParams& params) {
  auto old = out.precision(17);
  for (std::size_t i = 0; i < 4; ++i) out << kVKeys[i] << " = " << params.v[i] << '\n';
  for (std::size_t i = 0; i < 4; ++i) out << kWKeys[i] << " = " << params.w[i] << '\n';
  for (std::size_t i = 0; i < kYprMoveCount; ++i) out << kYprKeys[i] << " = " << params.ypr[i] << '\n';
  out.precision(old);
}

}  // namespace ndsub
