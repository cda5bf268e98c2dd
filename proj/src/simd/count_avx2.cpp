#include <immintrin.h>

#include "count_common.hpp"

namespace ndsub::simd {
namespace {

inline std::uint64_t popcount(__m256i mask) {
  return static_cast<std::uint64_t>(
      _mm_popcnt_u32(static_cast<unsigned>(_mm256_movemask_epi8(mask))));
}

inline __m256i load(const std::uint8_t* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

}  // namespace

AlignmentCounts count_alignment_avx2(std::span<const std::uint8_t> left,
                                     std::span<const std::uint8_t> right, std::size_t n) {
  detail::check_inputs(left, right, n);
  const std::uint8_t* l = left.data();
  const std::uint8_t* r = right.data();
  const __m256i va = _mm256_set1_epi8(detail::kA);
  const __m256i vt = _mm256_set1_epi8(detail::kT);
  const __m256i vc = _mm256_set1_epi8(detail::kC);
  const __m256i vg = _mm256_set1_epi8(detail::kG);

  AlignmentCounts c;
  std::size_t i = 0;
  // Lanes read sites i..i+33, which stay inside the n + 2 padded codes.
  for (; i + 32 <= n; i += 32) {
    const __m256i l0 = load(l + i), l1 = load(l + i + 1), l2 = load(l + i + 2);
    const __m256i r0 = load(r + i), r1 = load(r + i + 1), r2 = load(r + i + 2);

    const __m256i lc0 = _mm256_cmpeq_epi8(l0, vc);
    const __m256i la0 = _mm256_cmpeq_epi8(l0, va);
    const __m256i rc0 = _mm256_cmpeq_epi8(r0, vc);
    const __m256i ra0 = _mm256_cmpeq_epi8(r0, va);
    const __m256i rt0 = _mm256_cmpeq_epi8(r0, vt);
    const __m256i rg0 = _mm256_cmpeq_epi8(r0, vg);
    const __m256i rg1 = _mm256_cmpeq_epi8(r1, vg);
    const __m256i ra1 = _mm256_cmpeq_epi8(r1, va);
    const __m256i la1 = _mm256_cmpeq_epi8(l1, va);

    const __m256i pcc0 = _mm256_and_si256(lc0, rc0);
    const __m256i pcc1 = _mm256_and_si256(_mm256_cmpeq_epi8(l1, vc), _mm256_cmpeq_epi8(r1, vc));
    const __m256i pcc2 = _mm256_and_si256(_mm256_cmpeq_epi8(l2, vc), _mm256_cmpeq_epi8(r2, vc));
    const __m256i paa0 = _mm256_and_si256(la0, ra0);
    const __m256i paa1 = _mm256_and_si256(la1, ra1);
    const __m256i paa2 = _mm256_and_si256(_mm256_cmpeq_epi8(l2, va), _mm256_cmpeq_epi8(r2, va));
    const __m256i lct0 = _mm256_and_si256(lc0, rt0);

    c.letter_c += popcount(lc0);
    c.letter_a += popcount(la0);
    c.pair_cc += popcount(pcc0);
    c.pair_aa += popcount(paa0);
    c.word2_cc += popcount(_mm256_and_si256(pcc0, pcc1));
    c.word2_aa += popcount(_mm256_and_si256(paa0, paa1));
    c.word3_cc += popcount(_mm256_and_si256(pcc0, pcc2));
    c.word3_aa += popcount(_mm256_and_si256(paa0, paa2));
    c.ctx_c_cg += popcount(_mm256_and_si256(pcc0, rg1));
    c.ctx_a_cg += popcount(_mm256_and_si256(la1, _mm256_and_si256(rc0, rg1)));
    c.pair_ca += popcount(_mm256_and_si256(lc0, ra0));
    c.pair_ct += popcount(lct0);
    c.pair_cg += popcount(_mm256_and_si256(lc0, rg0));
    c.ctx_c_ta += popcount(_mm256_and_si256(lct0, ra1));
    c.ctx_c_tg += popcount(_mm256_and_si256(lct0, rg1));
    c.ctx_c_ca += popcount(_mm256_and_si256(pcc0, ra1));
  }
  detail::count_range(l, r, i, n, c);
  return c;
}

}  // namespace ndsub::simd
