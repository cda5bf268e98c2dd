#pragma once

#include <iosfwd>
#include <string>

#include "ndsub/simulator.hpp"

namespace ndsub {

/// Two-record FASTA, `>left` then `>right`, each sequence on one line.
void write_fasta(std::ostream& out, const AlignedPair& pair);

/// Accepts wrapped sequence lines, blank lines and either record order. Throws
/// std::invalid_argument unless there are exactly the records `left` and `right`
/// of equal length over ACGT. The returned pair is tagged with `mode`.
AlignedPair read_fasta(std::istream& in, Mode mode = Mode::Ancestor);
AlignedPair load_fasta(const std::string& path, Mode mode = Mode::Ancestor);

/// One line describing how an alignment was produced, e.g.
/// `n=1000 t=0.3 mode=ancestor seed=1 burn_in=5 params=jc_cpg_r:10`.
std::string metadata_line(const ExperimentSpec& spec);

/// Compact one-token form of a parameter set used in metadata lines.
std::string params_token(const SubstitutionParams& params);

}  // namespace ndsub
