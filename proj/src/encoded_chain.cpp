#include "ndsub/encoded_chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace ndsub {
namespace {

using enum Nucleotide;

constexpr std::uint8_t bit(Nucleotide x) { return static_cast<std::uint8_t>(1U << index(x)); }

std::string row_label(const std::vector<std::string>& labels, Eigen::Index i) {
  return labels[static_cast<std::size_t>(i)];
}

// All states of an encoding, as symbol indices per position, in lexicographic order.
std::vector<std::vector<std::size_t>> enumerate_states(const Encoding& enc) {
  std::vector<std::vector<std::size_t>> out{{}};
  for (const auto& alphabet : enc.positions) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& prefix : out) {
      for (std::size_t s = 0; s < alphabet.size(); ++s) {
        auto extended = prefix;
        extended.push_back(s);
        next.push_back(std::move(extended));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::size_t symbol_of(const PositionAlphabet& alphabet, Nucleotide x) {
  for (std::size_t s = 0; s < alphabet.size(); ++s) {
    if (alphabet[s].contains(x)) return s;
  }
  throw std::logic_error("encoding alphabet does not cover every nucleotide");
}

void fill_diagonal(Eigen::MatrixXd& q) {
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    q(i, i) = 0.0;
    q(i, i) = -q.row(i).sum();
  }
}

}  // namespace

namespace alphabets {
PositionAlphabet full() { return {{'A', bit(A)}, {'T', bit(T)}, {'C', bit(C)}, {'G', bit(G)}}; }
PositionAlphabet rtc() { return {{'R', static_cast<std::uint8_t>(bit(A) | bit(G))}, {'T', bit(T)}, {'C', bit(C)}}; }
PositionAlphabet yga() { return {{'Y', static_cast<std::uint8_t>(bit(T) | bit(C))}, {'G', bit(G)}, {'A', bit(A)}}; }
PositionAlphabet c_status() { return {{'C', bit(C)}, {'c', static_cast<std::uint8_t>(bit(A) | bit(T) | bit(G))}}; }
PositionAlphabet g_status() { return {{'G', bit(G)}, {'g', static_cast<std::uint8_t>(bit(A) | bit(T) | bit(C))}}; }
PositionAlphabet agy() { return {{'A', bit(A)}, {'G', bit(G)}, {'Y', static_cast<std::uint8_t>(bit(T) | bit(C))}}; }
}  // namespace alphabets

Encoding four_state_encoding() { return {{alphabets::c_status(), alphabets::g_status()}}; }
Encoding six_state_encoding() { return {{alphabets::c_status(), alphabets::agy()}}; }
Encoding nine_state_encoding() { return {{alphabets::rtc(), alphabets::yga()}}; }

Encoding windowed_encoding(int width) {
  if (width != 3 && width != 4) {
    throw std::invalid_argument("window width must be 3 or 4, got " + std::to_string(width));
  }
  Encoding enc;
  enc.positions.push_back(alphabets::rtc());
  for (int i = 0; i < width - 2; ++i) enc.positions.push_back(alphabets::full());
  enc.positions.push_back(alphabets::yga());
  return enc;
}

// ---------------------------------------------------------------------------

EncodedChain::EncodedChain(std::vector<std::string> labels, Eigen::MatrixXd generator)
    : labels_(std::move(labels)), generator_(std::move(generator)) {
  const auto n = static_cast<Eigen::Index>(labels_.size());
  if (generator_.rows() != n || generator_.cols() != n) {
    throw std::invalid_argument("generator shape does not match label count");
  }
  const auto check = check_generator(generator_);
  if (check.min_off_diagonal < 0.0) {
    throw std::invalid_argument("generator has a negative off-diagonal entry");
  }
  if (check.max_row_sum > kRowSumTolerance) {
    throw std::invalid_argument("generator rows do not sum to zero");
  }
  stationary_ = stationary_distribution(generator_);
}

std::size_t EncodedChain::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw std::out_of_range("no state labelled '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

StateSet EncodedChain::select(std::string_view pattern) const {
  StateSet out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const auto& label = labels_[i];
    if (label.size() != pattern.size()) {
      throw std::invalid_argument("pattern '" + std::string(pattern) + "' does not fit label '" +
                                  label + "'");
    }
    bool ok = true;
    for (std::size_t k = 0; k < label.size() && ok; ++k) {
      ok = pattern[k] == '*' || pattern[k] == label[k];
    }
    if (ok) out.push_back(i);
  }
  return out;
}

double EncodedChain::mass(const StateSet& states) const {
  double m = 0.0;
  for (auto i : states) m += stationary_(static_cast<Eigen::Index>(i));
  return m;
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& generator) {
  const auto n = generator.rows();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(generator.transpose(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double scale = std::max(sv(0), 1.0);
  if (n > 1 && sv(n - 2) <= 1e-9 * scale) {
    throw std::runtime_error("generator has more than one stationary distribution");
  }
  Eigen::VectorXd pi = svd.matrixV().col(n - 1);
  if (pi.sum() < 0.0) pi = -pi;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pi(i) < 0.0) {
      if (pi(i) < -1e-12 * pi.cwiseAbs().maxCoeff()) {
        throw std::runtime_error("stationary vector has a negative entry");
      }
      pi(i) = 0.0;
    }
  }
  return pi / pi.sum();
}

// ---------------------------------------------------------------------------

EncodedChain build_encoded(const SubstitutionParams& params, const Encoding& encoding) {
  params.validate();
  const auto states = enumerate_states(encoding);
  const auto width = encoding.positions.size();
  const auto n = states.size();

  std::map<std::vector<std::size_t>, std::size_t> index_of;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) {
    index_of[states[i]] = i;
    std::string label;
    for (std::size_t p = 0; p < width; ++p) label += encoding.positions[p][states[i][p]].name;
    labels.push_back(std::move(label));
  }

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a) {
    // Every concrete word represented by state a.
    std::vector<std::vector<Nucleotide>> words{{}};
    for (std::size_t p = 0; p < width; ++p) {
      std::vector<std::vector<Nucleotide>> next;
      const auto& sym = encoding.positions[p][states[a][p]];
      for (const auto& prefix : words) {
        for (auto x : kNucleotides) {
          if (!sym.contains(x)) continue;
          auto extended = prefix;
          extended.push_back(x);
          next.push_back(std::move(extended));
        }
      }
      words = std::move(next);
    }

    bool first = true;
    Eigen::VectorXd reference = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (const auto& word : words) {
      for (auto outside_left : kNucleotides) {
        for (auto outside_right : kNucleotides) {
          Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
          for (std::size_t p = 0; p < width; ++p) {
            const auto left = p == 0 ? outside_left : word[p - 1];
            const auto right = p + 1 == width ? outside_right : word[p + 1];
            for (auto y : kNucleotides) {
              if (y == word[p]) continue;
              const auto target_symbol = symbol_of(encoding.positions[p], y);
              if (target_symbol == states[a][p]) continue;
              auto target = states[a];
              target[p] = target_symbol;
              row(static_cast<Eigen::Index>(index_of.at(target))) +=
                  site_rate(params, left, word[p], right, y);
            }
          }
          if (first) {
            reference = row;
            first = false;
          } else if ((row - reference).cwiseAbs().maxCoeff() > 1e-12) {
            throw NotLumpable("encoded state '" + labels[a] +
                              "' has rates that depend on letters hidden by the encoding");
          }
        }
      }
    }
    q.row(static_cast<Eigen::Index>(a)) = reference.transpose();
  }
  fill_diagonal(q);
  return EncodedChain(std::move(labels), std::move(q));
}

namespace {

// r^x_v: YpR rate that moves a site to v when its neighbour is x. Pyrimidine
// neighbours sit on the left of a purine site; purine neighbours on the right
// of a pyrimidine site.
double ypr_superscript(const SubstitutionParams& p, char x, char v) {
  switch (x) {
    case 'C': return v == 'A' ? p.rate(YprMove::CG2CA) : p.rate(YprMove::CA2CG);
    case 'T': return v == 'G' ? p.rate(YprMove::TA2TG) : p.rate(YprMove::TG2TA);
    case 'G': return v == 'T' ? p.rate(YprMove::CG2TG) : p.rate(YprMove::TG2CG);
    case 'A': return v == 'T' ? p.rate(YprMove::CA2TA) : p.rate(YprMove::TA2CA);
    default: throw std::logic_error("bad YpR neighbour");
  }
}

double v_of(const SubstitutionParams& p, char u) {
  return p.v_of(*from_char(u));
}

double w_of(const SubstitutionParams& p, char u) {
  return p.w_of(*from_char(u));
}

}  // namespace

EncodedChain build_nine_state(const SubstitutionParams& params) {
  params.validate();
  static constexpr char kFirst[] = {'R', 'T', 'C'};
  static constexpr char kSecond[] = {'Y', 'G', 'A'};
  const double v_r = params.v_of(A) + params.v_of(G);
  const double v_y = params.v_of(T) + params.v_of(C);

  // m(ab, cd) for (a,b) != (c,d).
  auto m = [&](char a, char b, char c, char d) -> double {
    if (a != c && b != d) return 0.0;
    if (b == d) {  // left letter moves, right symbol x = b fixed
      if (a == 'R') return v_of(params, c);                      // m(Rx, ux) = v_u
      if (c == 'R') return v_r;                                  // m(ux, Rx) = v_R
      if (b == 'Y') return w_of(params, c);                      // m(uY, vY) = w_v
      return w_of(params, c) + ypr_superscript(params, b, c);    // m(ux, vx) = w_v + r^x_v
    }
    // right symbol moves, left symbol x = a fixed
    if (b == 'Y') return v_of(params, d);                        // m(xY, xu) = v_u
    if (d == 'Y') return v_y;                                    // m(xu, xY) = v_Y
    if (a == 'R') return w_of(params, d);                        // m(Ru, Rv) = w_v
    return w_of(params, d) + ypr_superscript(params, a, d);      // m(xu, xv) = w_v + r^x_v
  };

  std::vector<std::string> labels;
  for (char a : kFirst)
    for (char b : kSecond) labels.push_back({a, b});
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(9, 9);
  for (Eigen::Index i = 0; i < 9; ++i) {
    for (Eigen::Index j = 0; j < 9; ++j) {
      if (i == j) continue;
      const auto& from = labels[static_cast<std::size_t>(i)];
      const auto& to = labels[static_cast<std::size_t>(j)];
      q(i, j) = m(from[0], from[1], to[0], to[1]);
    }
  }
  fill_diagonal(q);
  return EncodedChain(std::move(labels), std::move(q));
}

EncodedChain build_four_state_jc(double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("CpG rate r must be >= 0");
  Eigen::MatrixXd q(4, 4);
  // clang-format off
  q << -(6 + 2 * r), 3 + r,  0.0, 3 + r,
       1.0,          -4.0,   3.0, 0.0,
       0.0,          1.0,   -2.0, 1.0,
       1.0,          0.0,    3.0, -4.0;
  // clang-format on
  return EncodedChain({"CG", "cG", "cg", "Cg"}, std::move(q));
}

EncodedChain build_six_state_jc(double r) {
  return build_encoded(jc_cpg_params(r), six_state_encoding());
}

EncodedChain build_windowed(const SubstitutionParams& params, int width) {
  return build_encoded(params, windowed_encoding(width));
}

EncodedChain lump(const EncodedChain& chain, const std::vector<std::size_t>& block_of,
                  std::vector<std::string> block_labels, double tolerance) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  const auto blocks = static_cast<Eigen::Index>(block_labels.size());
  if (static_cast<Eigen::Index>(block_of.size()) != n) {
    throw std::invalid_argument("lump: block map size mismatch");
  }
  const auto& q = chain.generator();
  Eigen::MatrixXd aggregated = Eigen::MatrixXd::Zero(n, blocks);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      aggregated(i, static_cast<Eigen::Index>(block_of[static_cast<std::size_t>(j)])) += q(i, j);
    }
  }
  Eigen::MatrixXd lumped = Eigen::MatrixXd::Zero(blocks, blocks);
  std::vector<bool> seen(static_cast<std::size_t>(blocks), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto b = block_of[static_cast<std::size_t>(i)];
    const auto bi = static_cast<Eigen::Index>(b);
    if (!seen[b]) {
      lumped.row(bi) = aggregated.row(i);
      seen[b] = true;
    } else if ((lumped.row(bi) - aggregated.row(i)).cwiseAbs().maxCoeff() > tolerance) {
      throw NotLumpable("state '" + row_label(chain.labels(), i) + "' breaks lumpability of block '" +
                        block_labels[b] + "'");
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw std::invalid_argument("lump: empty block");
  }
  fill_diagonal(lumped);
  return EncodedChain(std::move(block_labels), std::move(lumped));
}

GeneratorCheck check_generator(const Eigen::MatrixXd& generator) {
  GeneratorCheck out;
  for (Eigen::Index i = 0; i < generator.rows(); ++i) {
    out.max_row_sum = std::max(out.max_row_sum, std::abs(generator.row(i).sum()));
    for (Eigen::Index j = 0; j < generator.cols(); ++j) {
      if (i != j) out.min_off_diagonal = std::min(out.min_off_diagonal, generator(i, j));
    }
  }
  return out;
}

double detailed_balance_residual(const EncodedChain& chain) {
  const auto& q = chain.generator();
  const auto& pi = chain.stationary();
  double worst = 0.0;
  for (Eigen::Index a = 0; a < q.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < q.cols(); ++b) {
      worst = std::max(worst, std::abs(pi(a) * q(a, b) - pi(b) * q(b, a)));
    }
  }
  return worst;
}

double kolmogorov_cycle_gap(const EncodedChain& chain, const std::vector<std::string>& cycle) {
  if (cycle.size() < 3) throw std::invalid_argument("a cycle needs at least three states");
  const auto& q = chain.generator();
  double forward = 1.0;
  double backward = 1.0;
  for (std::size_t k = 0; k < cycle.size(); ++k) {
    const auto a = static_cast<Eigen::Index>(chain.index_of(cycle[k]));
    const auto b = static_cast<Eigen::Index>(chain.index_of(cycle[(k + 1) % cycle.size()]));
    forward *= q(a, b);
    backward *= q(b, a);
  }
  const double scale = std::max(forward, backward);
  return scale == 0.0 ? 0.0 : std::abs(forward - backward) / scale;
}

double spectral_gap(const EncodedChain& chain) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(chain.generator(), false);
  const auto& lambda = solver.eigenvalues();
  const double scale = std::max(1.0, chain.generator().cwiseAbs().maxCoeff());
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double re = std::abs(lambda(i).real());
    if (std::abs(lambda(i)) > 1e-9 * scale) gap = std::min(gap, re);
  }
  return gap;
}

}  // namespace ndsub
