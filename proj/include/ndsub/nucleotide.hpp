#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ndsub {

// Codes follow the A, T, C, G ordering used by the RN rate matrix.
enum class Nucleotide : std::uint8_t { A = 0, T = 1, C = 2, G = 3 };

inline constexpr std::array<Nucleotide, 4> kNucleotides = {Nucleotide::A, Nucleotide::T,
                                                           Nucleotide::C, Nucleotide::G};

constexpr std::size_t index(Nucleotide x) { return static_cast<std::size_t>(x); }

constexpr bool is_purine(Nucleotide x) { return x == Nucleotide::A || x == Nucleotide::G; }
constexpr bool is_pyrimidine(Nucleotide x) { return !is_purine(x); }

constexpr char to_char(Nucleotide x) {
  constexpr char kChars[] = {'A', 'T', 'C', 'G'};
  return kChars[index(x)];
}

constexpr std::optional<Nucleotide> from_char(char c) {
  switch (c) {
    case 'A': case 'a': return Nucleotide::A;
    case 'T': case 't': return Nucleotide::T;
    case 'C': case 'c': return Nucleotide::C;
    case 'G': case 'g': return Nucleotide::G;
    default: return std::nullopt;
  }
}

/// Ancestor: left is the time-0 ancestor, right its descendant at time t.
/// Divergence: left and right descend independently from a common ancestor.
enum class Mode { Ancestor, Divergence };

/// Letters that carry a time estimator.
enum class Letter { A, C };

const char* to_string(Mode mode);
char to_char(Letter letter);
std::optional<Mode> parse_mode(std::string_view text);
std::optional<Letter> parse_letter(std::string_view text);

/// Circular nucleotide sequence. Site N-1's right neighbour is site 0.
class Sequence {
 public:
  static constexpr std::size_t kMinLength = 3;

  Sequence() = default;
  explicit Sequence(std::vector<Nucleotide> sites);
  static Sequence parse(std::string_view text);

  std::size_t size() const { return sites_.size(); }
  Nucleotide operator[](std::size_t i) const { return sites_[i]; }
  Nucleotide& operator[](std::size_t i) { return sites_[i]; }
  Nucleotide at_wrapped(std::ptrdiff_t i) const {
    auto n = static_cast<std::ptrdiff_t>(sites_.size());
    return sites_[static_cast<std::size_t>(((i % n) + n) % n)];
  }

  const std::vector<Nucleotide>& sites() const { return sites_; }
  std::string str() const;

  bool operator==(const Sequence&) const = default;

 private:
  std::vector<Nucleotide> sites_;
};

}  // namespace ndsub
