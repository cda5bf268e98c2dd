#include "ndsub/nucleotide.hpp"

namespace ndsub {

const char* to_string(Mode mode) { return mode == Mode::Ancestor ? "ancestor" : "divergence"; }
char to_char(Letter letter) { return letter == Letter::A ? 'A' : 'C'; }

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "ancestor") return Mode::Ancestor;
  if (text == "divergence") return Mode::Divergence;
  return std::nullopt;
}

std::optional<Letter> parse_letter(std::string_view text) {
  if (text == "A") return Letter::A;
  if (text == "C") return Letter::C;
  return std::nullopt;
}

Sequence::Sequence(std::vector<Nucleotide> sites) : sites_(std::move(sites)) {
  if (sites_.size() < kMinLength) {
    throw std::invalid_argument("sequence must have at least 3 sites, got " +
                                std::to_string(sites_.size()));
  }
}

Sequence Sequence::parse(std::string_view text) {
  std::vector<Nucleotide> sites;
  sites.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    auto x = from_char(text[i]);
    if (!x) {
      throw std::invalid_argument("invalid nucleotide '" + std::string(1, text[i]) +
                                  "' at position " + std::to_string(i));
    }
    sites.push_back(*x);
  }
  return Sequence(std::move(sites));
}

std::string Sequence::str() const {
  std::string out(sites_.size(), 'A');
  for (std::size_t i = 0; i < sites_.size(); ++i) out[i] = to_char(sites_[i]);
  return out;
}

}  // namespace ndsub
