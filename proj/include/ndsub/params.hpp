#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "ndsub/nucleotide.hpp"

namespace ndsub {

/// The eight YpR dinucleotide moves, named by the transition they perform.
enum class YprMove : std::uint8_t {
  CG2CA,  // G -> A, left neighbour C
  CG2TG,  // C -> T, right neighbour G
  TA2CA,  // T -> C, right neighbour A
  TA2TG,  // A -> G, left neighbour T
  CA2CG,  // A -> G, left neighbour C
  CA2TA,  // C -> T, right neighbour A
  TG2CG,  // T -> C, right neighbour G
  TG2TA,  // G -> A, left neighbour T
};

inline constexpr std::size_t kYprMoveCount = 8;

/// Parameter-file key for a move, e.g. "rCG2CA".
std::string_view ypr_key(YprMove move);

/// Rates of an RN single-site process with YpR neighbour influence.
///
/// The single-site rate for x -> y is w_y when x and y are both purines or both
/// pyrimidines and v_y otherwise. YpR moves add their rate on top of that base
/// rate when the neighbour completes the dinucleotide.
struct SubstitutionParams {
  std::array<double, 4> v{1.0, 1.0, 1.0, 1.0};  // indexed by target nucleotide
  std::array<double, 4> w{1.0, 1.0, 1.0, 1.0};
  std::array<double, kYprMoveCount> ypr{};

  double& v_of(Nucleotide y) { return v[index(y)]; }
  double v_of(Nucleotide y) const { return v[index(y)]; }
  double& w_of(Nucleotide y) { return w[index(y)]; }
  double w_of(Nucleotide y) const { return w[index(y)]; }
  double& rate(YprMove m) { return ypr[static_cast<std::size_t>(m)]; }
  double rate(YprMove m) const { return ypr[static_cast<std::size_t>(m)]; }

  /// Throws std::invalid_argument unless all rates are >= 0 and every v_x > 0.
  void validate() const;

  /// The CpG intensity r when these are Jukes-Cantor + CpG rates.
  std::optional<double> jc_cpg_r() const;

  bool operator==(const SubstitutionParams&) const = default;
};

/// Jukes-Cantor rates (all 1) plus rate r on CG -> CA and CG -> TG.
SubstitutionParams jc_cpg_params(double r);

/// Rate of the substitution x -> y at a site whose neighbours are `left` and `right`.
double site_rate(const SubstitutionParams& params, Nucleotide left, Nucleotide x,
                 Nucleotide right, Nucleotide y);

/// Sum of site_rate over the three possible targets.
double total_site_rate(const SubstitutionParams& params, Nucleotide left, Nucleotide x,
                       Nucleotide right);

/// Largest total_site_rate over all 64 neighbourhoods.
double max_total_site_rate(const SubstitutionParams& params);

/// Parses the flat `key = value` parameter format. Lines starting with '#' are
/// ignored. Either `jc_cpg_r` alone, or all of v_* and w_* with optional r* keys.
SubstitutionParams parse_params(std::istream& in);
SubstitutionParams load_params(const std::string& path);
void write_params(std::ostream& out, const SubstitutionParams& params);

}  // namespace ndsub
