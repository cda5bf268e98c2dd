#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "ndsub/encoded_chain.hpp"

namespace ndsub {
namespace {

using N = Nucleotide;

SubstitutionParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> base(0.1, 3.0);
  std::uniform_real_distribution<double> extra(0.0, 5.0);
  std::bernoulli_distribution off(0.3);
  SubstitutionParams p;
  for (auto& v : p.v) v = base(rng);
  for (auto& w : p.w) w = base(rng);
  for (auto& r : p.ypr) r = off(rng) ? 0.0 : extra(rng);
  return p;
}

double max_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Rates used by the chains must not depend on how states are listed, so
// compare entry by entry through labels.
double label_diff(const EncodedChain& a, const EncodedChain& b) {
  double worst = 0.0;
  for (const auto& x : a.labels()) {
    for (const auto& y : a.labels()) {
      const auto ia = static_cast<Eigen::Index>(a.index_of(x)), ja = static_cast<Eigen::Index>(a.index_of(y));
      const auto ib = static_cast<Eigen::Index>(b.index_of(x)), jb = static_cast<Eigen::Index>(b.index_of(y));
      worst = std::max(worst, std::abs(a.generator()(ia, ja) - b.generator()(ib, jb)));
    }
  }
  return worst;
}

double q(const EncodedChain& c, const char* from, const char* to) {
  return c.generator()(static_cast<Eigen::Index>(c.index_of(from)),
                       static_cast<Eigen::Index>(c.index_of(to)));
}

TEST(JcCpgParams, ZeroIsJukesCantor) {
  const auto p = jc_cpg_params(0.0);
  for (double v : p.v) EXPECT_EQ(v, 1.0);
  for (double w : p.w) EXPECT_EQ(w, 1.0);
  for (double r : p.ypr) EXPECT_EQ(r, 0.0);
  EXPECT_EQ(p.jc_cpg_r(), 0.0);
}

TEST(JcCpgParams, CpgMovesCarryR) {
  const auto p = jc_cpg_params(10.0);
  for (std::size_t m = 0; m < kYprMoveCount; ++m) {
    const auto move = static_cast<YprMove>(m);
    const bool cpg = move == YprMove::CG2CA || move == YprMove::CG2TG;
    EXPECT_EQ(p.rate(move), cpg ? 10.0 : 0.0) << ypr_key(move);
  }
  EXPECT_EQ(p.jc_cpg_r(), 10.0);
}

TEST(JcCpgParams, NegativeRejected) { EXPECT_THROW(jc_cpg_params(-0.1), std::invalid_argument); }

TEST(JcCpgParams, CInCpgLeavesAtThreePlusR) {
  const auto p = jc_cpg_params(2.0);
  for (auto left : kNucleotides) EXPECT_DOUBLE_EQ(total_site_rate(p, left, N::C, N::G), 5.0);
}

TEST(SiteRate, ElevatedTargetInCpg) {
  const auto p = jc_cpg_params(2.0);
  for (auto right : kNucleotides) EXPECT_DOUBLE_EQ(site_rate(p, N::C, N::G, right, N::A), 3.0);
  EXPECT_DOUBLE_EQ(site_rate(p, N::C, N::G, N::A, N::T), 1.0);
}

TEST(SiteRate, NoInfluenceOutsideCpg) {
  EXPECT_DOUBLE_EQ(site_rate(jc_cpg_params(2.0), N::T, N::C, N::A, N::T), 1.0);
}

TEST(SiteRate, YprIncrementOnPurine) {
  SubstitutionParams p;
  p.w_of(N::G) = 2.5;
  p.rate(YprMove::TA2TG) = 0.7;
  for (auto right : kNucleotides) EXPECT_DOUBLE_EQ(site_rate(p, N::T, N::A, right, N::G), 3.2);
  EXPECT_DOUBLE_EQ(site_rate(p, N::C, N::A, N::A, N::G), 2.5);
}

TEST(SiteRate, RnBaseRates) {
  SubstitutionParams p;
  p.v = {0.1, 0.2, 0.3, 0.4};
  p.w = {1.1, 1.2, 1.3, 1.4};
  EXPECT_DOUBLE_EQ(site_rate(p, N::A, N::A, N::A, N::T), 0.2);  // transversion to T
  EXPECT_DOUBLE_EQ(site_rate(p, N::A, N::G, N::A, N::A), 1.1);  // purine to purine
  EXPECT_DOUBLE_EQ(site_rate(p, N::A, N::C, N::A, N::T), 1.2);
  EXPECT_DOUBLE_EQ(site_rate(p, N::A, N::T, N::A, N::G), 0.4);
}

TEST(SiteRate, SameLetterRejected) {
  EXPECT_THROW(site_rate(jc_cpg_params(1.0), N::A, N::C, N::A, N::C), std::invalid_argument);
}

TEST(SubstitutionParams, Validation) {
  SubstitutionParams p;
  p.v_of(N::T) = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.v_of(N::T) = 1.0;
  p.rate(YprMove::CA2CG) = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(NineState, JcCpgEntries) {
  for (double r : {0.0, 1.0, 10.0}) {
    const auto nine = build_nine_state(jc_cpg_params(r));
    EXPECT_DOUBLE_EQ(q(nine, "CG", "CA"), 1.0 + r);
    EXPECT_DOUBLE_EQ(q(nine, "CG", "TG"), 1.0 + r);
  }
}

TEST(NineState, TransversionEntries) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const auto p = random_params(rng);
    const auto nine = build_nine_state(p);
    EXPECT_DOUBLE_EQ(q(nine, "RY", "RG"), p.v_of(N::G));
    EXPECT_DOUBLE_EQ(q(nine, "RY", "RA"), p.v_of(N::A));
  }
}

TEST(NineState, UniformLettersWithoutCpg) {
  const auto nine = build_nine_state(jc_cpg_params(0.0));
  EXPECT_NEAR(nine.mass(nine.select("C*")), 0.25, 1e-14);
}

// The transcribed 9x9 rate function against the chain lumped straight from
// site_rate, over random RN + YpR rates.
TEST(NineState, MatchesLumpingOfSiteRates) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const auto p = random_params(rng);
    EXPECT_LE(label_diff(build_nine_state(p), build_encoded(p, nine_state_encoding())), 1e-12);
  }
}

TEST(EncodedChains, GeneratorInvariants) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    const auto p = random_params(rng);
    for (const auto& chain : {build_nine_state(p), build_windowed(p, 3), build_windowed(p, 4)}) {
      const auto g = check_generator(chain.generator());
      EXPECT_LE(g.max_row_sum, 1e-12);
      EXPECT_GE(g.min_off_diagonal, 0.0);
      const auto& pi = chain.stationary();
      EXPECT_NEAR(pi.sum(), 1.0, 1e-12);
      EXPECT_GE(pi.minCoeff(), 0.0);
      EXPECT_LE((pi.transpose() * chain.generator()).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(EncodedChain, RejectsBadGenerators) {
  Eigen::MatrixXd g(2, 2);
  g << -1.0, 1.0, 2.0, -1.0;
  EXPECT_THROW(EncodedChain({"a", "b"}, g), std::invalid_argument);
  g << 1.0, -1.0, 2.0, -2.0;
  EXPECT_THROW(EncodedChain({"a", "b"}, g), std::invalid_argument);
  Eigen::MatrixXd disconnected = Eigen::MatrixXd::Zero(2, 2);
  EXPECT_THROW(EncodedChain({"a", "b"}, disconnected), std::runtime_error);
}

TEST(EncodedChain, SelectPatterns) {
  const auto nine = build_nine_state(jc_cpg_params(1.0));
  EXPECT_EQ(nine.select("C*").size(), 3u);
  EXPECT_EQ(nine.select("*A").size(), 3u);
  EXPECT_EQ(nine.select("CG").size(), 1u);
  EXPECT_EQ(nine.select("**").size(), 9u);
  EXPECT_THROW(nine.index_of("XX"), std::out_of_range);
}

TEST(FourState, MatchesPrintedMatrix) {
  for (double r : {0.0, 2.0, 10.0}) {
    const auto four = build_four_state_jc(r);
    EXPECT_EQ(four.labels(), (std::vector<std::string>{"CG", "cG", "cg", "Cg"}));
    EXPECT_DOUBLE_EQ(q(four, "CG", "CG"), -(6.0 + 2.0 * r));
    EXPECT_DOUBLE_EQ(q(four, "CG", "cG"), 3.0 + r);
    EXPECT_DOUBLE_EQ(q(four, "CG", "Cg"), 3.0 + r);
    EXPECT_DOUBLE_EQ(q(four, "cg", "cG"), 1.0);
    EXPECT_DOUBLE_EQ(q(four, "cG", "cg"), 3.0);
  }
}

TEST(FourState, StationaryCpg) {
  const auto four = build_four_state_jc(2.0);
  EXPECT_NEAR(four.mass(four.select("CG")), 1.0 / 26.0, 1e-15);
  for (double r : {0.0, 0.5, 10.0}) {
    const auto c = build_four_state_jc(r);
    EXPECT_NEAR(c.mass(c.select("CG")), 1.0 / (16.0 + 5.0 * r), 1e-15);
    EXPECT_NEAR(c.mass(c.select("C*")), (4.0 + r) / (16.0 + 5.0 * r), 1e-15);
  }
}

TEST(FourState, DetailedBalance) {
  for (double r : {0.0, 0.5, 1.0, 3.0, 10.0}) {
    EXPECT_LE(detailed_balance_residual(build_four_state_jc(r)), 1e-10);
  }
}

TEST(FourState, EqualsLumpedSiteRates) {
  for (double r : {0.0, 1.0, 10.0}) {
    EXPECT_LE(label_diff(build_four_state_jc(r),
                         build_encoded(jc_cpg_params(r), four_state_encoding())),
              1e-12);
  }
}

TEST(SixState, CycleCriterionBrokenWithCpg) {
  const std::vector<std::string> cycle{"CA", "CY", "CG"};
  EXPECT_GT(kolmogorov_cycle_gap(build_six_state_jc(1.0), cycle), 1e-6);
  EXPECT_GT(kolmogorov_cycle_gap(build_six_state_jc(10.0), cycle), 1e-6);
  EXPECT_LE(kolmogorov_cycle_gap(build_six_state_jc(0.0), cycle), 1e-14);
}

TEST(SixState, ReversibleWithoutCpg) {
  EXPECT_LE(detailed_balance_residual(build_six_state_jc(0.0)), 1e-14);
  EXPECT_GT(detailed_balance_residual(build_six_state_jc(1.0)), 1e-6);
}

TEST(SixState, AMarginal) {
  for (double r : {0.0, 1.0, 10.0}) {
    const auto six = build_six_state_jc(r);
    const auto nine = build_nine_state(jc_cpg_params(r));
    EXPECT_NEAR(six.mass(six.select("*A")), nine.mass(nine.select("*A")), 1e-14);
    EXPECT_NEAR(six.mass(six.select("*A")), (8.0 + 3.0 * r) / (2.0 * (16.0 + 5.0 * r)), 1e-14);
  }
}

TEST(Windowed, Sizes) {
  const auto p = jc_cpg_params(1.0);
  EXPECT_EQ(build_windowed(p, 3).size(), 36u);
  EXPECT_EQ(build_windowed(p, 4).size(), 144u);
  EXPECT_THROW(build_windowed(p, 2), std::invalid_argument);
  EXPECT_THROW(build_windowed(p, 5), std::invalid_argument);
}

TEST(Windowed, UniformCStatusWithoutCpg) {
  const auto w3 = build_windowed(jc_cpg_params(0.0), 3);
  EXPECT_NEAR(w3.mass(w3.select("C**")), 0.25, 1e-14);
  EXPECT_NEAR(w3.mass(w3.select("*C*")), 0.25, 1e-14);
}

// Projecting the 3-site window onto its first two coordinates must reproduce
// the dinucleotide chain exactly.
TEST(Windowed, LumpsOntoNineState) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 10; ++k) {
    const auto p = random_params(rng);
    const auto nine = build_nine_state(p);
    const auto w3 = build_windowed(p, 3);
    std::vector<std::size_t> block_of;
    for (const auto& label : w3.labels()) {
      const char mid = label[1];
      const char cls = mid == 'T' || mid == 'C' ? 'Y' : mid;
      block_of.push_back(nine.index_of(std::string{label[0], cls}));
    }
    const auto lumped = lump(w3, block_of, nine.labels(), 1e-10);
    EXPECT_LE(max_diff(lumped.generator(), nine.generator()), 1e-10);
  }
}

TEST(Lump, DetectsNonLumpablePartition) {
  const auto four = build_four_state_jc(3.0);
  // Joining CG with cg makes the aggregated rate into the other blocks differ.
  EXPECT_THROW(lump(four, {0, 1, 0, 2}, {"x", "y", "z"}), NotLumpable);
}

TEST(ParamsFile, FullRoundTrip) {
  std::mt19937_64 rng(23);
  const auto p = random_params(rng);
  std::stringstream buf;
  write_params(buf, p);
  EXPECT_EQ(parse_params(buf), p);
}

TEST(ParamsFile, Shorthand) {
  std::istringstream in("# Jukes-Cantor with CpG\njc_cpg_r = 10\n");
  EXPECT_EQ(parse_params(in), jc_cpg_params(10.0));
}

TEST(ParamsFile, MissingYprDefaultsToZero) {
  std::istringstream in("v_A=1\nv_T=1\nv_C=1\nv_G=1\nw_A=3\nw_T=3\nw_C=3\nw_G=3\nrCG2CA = 10\n");
  const auto p = parse_params(in);
  EXPECT_EQ(p.rate(YprMove::CG2CA), 10.0);
  EXPECT_EQ(p.rate(YprMove::CG2TG), 0.0);
  EXPECT_EQ(p.w_of(N::G), 3.0);
}

TEST(ParamsFile, Rejections) {
  const char* bad[] = {
      "jc_cpg_r = 1\nv_A = 1\n",
      "jc_cpg_r = 1\njc_cpg_r = 2\n",
      "v_A=1\nv_T=1\nv_C=1\nv_G=1\nw_A=1\nw_T=1\nw_C=1\n",
      "v_A=1\nv_T=1\nv_C=1\nv_G=1\nw_A=1\nw_T=1\nw_C=1\nw_G=1\nrXX=2\n",
      "v_A=1\nv_T=1\nv_C=1\nv_G=-1\nw_A=1\nw_T=1\nw_C=1\nw_G=1\n",
      "jc_cpg_r = ten\n",
      "jc_cpg_r\n",
      "",
  };
  for (const char* text : bad) {
    std::istringstream in(text);
    EXPECT_THROW(parse_params(in), std::invalid_argument) << text;
  }
}

TEST(Sequence, ParseAndLength) {
  EXPECT_EQ(Sequence::parse("acgt").str(), "ACGT");
  EXPECT_THROW(Sequence::parse("ACN"), std::invalid_argument);
  EXPECT_THROW(Sequence::parse("CA"), std::invalid_argument);
  const auto s = Sequence::parse("ACG");
  EXPECT_EQ(s.at_wrapped(-1), N::G);
  EXPECT_EQ(s.at_wrapped(3), N::A);
}

}  // namespace
}  // namespace ndsub
