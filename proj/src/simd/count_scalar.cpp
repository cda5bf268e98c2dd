#include "count_common.hpp"

#include <stdexcept>

namespace ndsub::simd {

AlignmentCounts& AlignmentCounts::operator+=(const AlignmentCounts& o) {
  letter_c += o.letter_c;
  letter_a += o.letter_a;
  pair_cc += o.pair_cc;
  pair_aa += o.pair_aa;
  word2_cc += o.word2_cc;
  word2_aa += o.word2_aa;
  word3_cc += o.word3_cc;
  word3_aa += o.word3_aa;
  ctx_c_cg += o.ctx_c_cg;
  ctx_a_cg += o.ctx_a_cg;
  pair_ca += o.pair_ca;
  pair_ct += o.pair_ct;
  pair_cg += o.pair_cg;
  ctx_c_ta += o.ctx_c_ta;
  ctx_c_tg += o.ctx_c_tg;
  ctx_c_ca += o.ctx_c_ca;
  return *this;
}

namespace detail {
void check_inputs(std::span<const std::uint8_t> left, std::span<const std::uint8_t> right,
                  std::size_t n) {
  if (n < 3 || left.size() < n + 2 || right.size() < n + 2) {
    throw std::invalid_argument("count_alignment: need n >= 3 and n + 2 padded codes per side");
  }
}
}  // namespace detail

AlignmentCounts count_alignment_scalar(std::span<const std::uint8_t> left,
                                       std::span<const std::uint8_t> right, std::size_t n) {
  detail::check_inputs(left, right, n);
  AlignmentCounts c;
  detail::count_range(left.data(), right.data(), 0, n, c);
  return c;
}

}  // namespace ndsub::simd
