#include "ndsub/alignment_io.hpp"

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ndsub {

void write_fasta(std::ostream& out, const AlignedPair& pair) {
  pair.validate();
  out << ">left\n" << pair.left.str() << "\n>right\n" << pair.right.str() << '\n';
}

AlignedPair read_fasta(std::istream& in, Mode mode) {
  std::optional<std::string> left, right;
  std::string* current = nullptr;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '>') {
      std::istringstream header(line.substr(1));
      std::string name;
      header >> name;
      std::optional<std::string>* slot = name == "left" ? &left : name == "right" ? &right : nullptr;
      if (slot == nullptr) {
        throw std::invalid_argument("FASTA line " + std::to_string(line_no) +
                                    ": expected record 'left' or 'right', got '" + name + "'");
      }
      if (slot->has_value()) throw std::invalid_argument("FASTA: duplicate record '" + name + "'");
      slot->emplace();
      current = &**slot;
      continue;
    }
    if (current == nullptr) {
      throw std::invalid_argument("FASTA line " + std::to_string(line_no) +
                                  ": sequence data before the first header");
    }
    for (char c : line) {
      if (c == ' ' || c == '\t') continue;
      current->push_back(c);
    }
  }
  if (!left || !right) throw std::invalid_argument("FASTA: need both 'left' and 'right' records");

  AlignedPair pair{Sequence::parse(*left), Sequence::parse(*right), mode};
  pair.validate();
  return pair;
}

AlignedPair load_fasta(const std::string& path, Mode mode) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open alignment file '" + path + "'");
  return read_fasta(in, mode);
}

std::string params_token(const SubstitutionParams& params) {
  std::ostringstream out;
  out.precision(17);
  if (auto r = params.jc_cpg_r()) {
    out << "jc_cpg_r:" << *r;
    return out.str();
  }
  const char* sep = "";
  for (auto x : kNucleotides) {
    out << sep << "v_" << to_char(x) << ':' << params.v_of(x);
    sep = ",";
  }
  for (auto x : kNucleotides) out << ",w_" << to_char(x) << ':' << params.w_of(x);
  for (std::size_t m = 0; m < kYprMoveCount; ++m) {
    const auto move = static_cast<YprMove>(m);
    if (params.rate(move) != 0.0) out << ',' << ypr_key(move) << ':' << params.rate(move);
  }
  return out.str();
}

std::string metadata_line(const ExperimentSpec& spec) {
  std::ostringstream out;
  out.precision(12);
  out << "n=" << spec.n << " t=" << spec.t << " mode=" << to_string(spec.mode)
      << " seed=" << spec.seed << " burn_in=" << spec.burn_in
      << " params=" << params_token(spec.params);
  return out.str();
}

}  // namespace ndsub
