#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ndsub/params.hpp"

namespace ndsub {

/// One symbol of an encoding alphabet: a display character and the set of
/// nucleotides it stands for (bit i set for Nucleotide code i).
struct EncodingSymbol {
  char name;
  std::uint8_t letters;

  bool contains(Nucleotide x) const { return (letters >> index(x)) & 1U; }
};

using PositionAlphabet = std::vector<EncodingSymbol>;

/// A window of consecutive sites, each position collapsed by its own alphabet.
struct Encoding {
  std::vector<PositionAlphabet> positions;
};

namespace alphabets {
PositionAlphabet full();      // A T C G
PositionAlphabet rtc();       // R={A,G} T C
PositionAlphabet yga();       // Y={T,C} G A
PositionAlphabet c_status();  // C, c = not C
PositionAlphabet g_status();  // G, g = not G
PositionAlphabet agy();       // A G Y
}  // namespace alphabets

Encoding four_state_encoding();  // {C,c} x {G,g}
Encoding six_state_encoding();   // {C,c} x {A,G,Y}
Encoding nine_state_encoding();  // {R,T,C} x {Y,G,A}
Encoding windowed_encoding(int width);

using StateSet = std::vector<std::size_t>;

class NotLumpable : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Finite-state CTMC over encoded words. Lowercase symbols denote complements
/// ("c" is any letter but C).
class EncodedChain {
 public:
  static constexpr double kRowSumTolerance = 1e-12;

  /// Validates the generator and solves for its unique stationary vector.
  EncodedChain(std::vector<std::string> labels, Eigen::MatrixXd generator);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const Eigen::MatrixXd& generator() const { return generator_; }
  const Eigen::VectorXd& stationary() const { return stationary_; }

  std::size_t index_of(std::string_view label) const;

  /// States whose label matches `pattern` position by position; '*' is a wildcard.
  StateSet select(std::string_view pattern) const;

  double mass(const StateSet& states) const;

 private:
  std::vector<std::string> labels_;
  Eigen::MatrixXd generator_;
  Eigen::VectorXd stationary_;
};

/// Left null vector of a generator, normalized to a probability vector.
/// Throws std::runtime_error if the null space is not one-dimensional.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& generator);

/// Builds the chain of an encoded window directly from site_rate, checking that
/// the lumped rates do not depend on the representative word or on the two
/// letters just outside the window. Throws NotLumpable otherwise.
EncodedChain build_encoded(const SubstitutionParams& params, const Encoding& encoding);

/// The {R,T,C} x {Y,G,A} dinucleotide chain, entry by entry from the rate function m.
EncodedChain build_nine_state(const SubstitutionParams& params);

/// The 4x4 {C,c} x {G,g} chain of Jukes-Cantor + CpG, states CG, cG, cg, Cg.
EncodedChain build_four_state_jc(double r);

/// The {C,c} x {A,G,Y} chain of Jukes-Cantor + CpG, lumped from site_rate.
EncodedChain build_six_state_jc(double r);

/// {R,T,C} x A^(width-2) x {Y,G,A}; width 3 gives 36 states, width 4 gives 144.
EncodedChain build_windowed(const SubstitutionParams& params, int width);

/// Strong lumping: `block_of[i]` is the block of state i. Throws NotLumpable if
/// the aggregated rate into some block differs between members of a block.
EncodedChain lump(const EncodedChain& chain, const std::vector<std::size_t>& block_of,
                  std::vector<std::string> block_labels, double tolerance = 1e-12);

/// Maximum |row sum| and the most negative off-diagonal (0 if none).
struct GeneratorCheck {
  double max_row_sum = 0.0;
  double min_off_diagonal = 0.0;
};
GeneratorCheck check_generator(const Eigen::MatrixXd& generator);

/// max |pi_a Q(a,b) - pi_b Q(b,a)|.
double detailed_balance_residual(const EncodedChain& chain);

/// Relative gap |fwd - bwd| / max(fwd, bwd) between the rate products around a
/// cycle of states and its reverse.
double kolmogorov_cycle_gap(const EncodedChain& chain, const std::vector<std::string>& cycle);

/// Smallest nonzero |Re(lambda)| over the generator spectrum.
double spectral_gap(const EncodedChain& chain);

}  // namespace ndsub
