#pragma once

#include "ndsub/simd/count_kernels.hpp"

namespace ndsub::simd::detail {

inline constexpr std::uint8_t kA = 0, kT = 1, kC = 2, kG = 3;

/// Scalar accumulation over sites [begin, end); shared by every variant for tails.
inline void count_range(const std::uint8_t* l, const std::uint8_t* r, std::size_t begin,
                        std::size_t end, AlignmentCounts& c) {
  for (std::size_t i = begin; i < end; ++i) {
    const bool lc = l[i] == kC, la = l[i] == kA;
    const bool pcc0 = lc && r[i] == kC;
    const bool pcc1 = l[i + 1] == kC && r[i + 1] == kC;
    const bool pcc2 = l[i + 2] == kC && r[i + 2] == kC;
    const bool paa0 = la && r[i] == kA;
    const bool paa1 = l[i + 1] == kA && r[i + 1] == kA;
    const bool paa2 = l[i + 2] == kA && r[i + 2] == kA;
    const bool rg1 = r[i + 1] == kG;

    c.letter_c += lc;
    c.letter_a += la;
    c.pair_cc += pcc0;
    c.pair_aa += paa0;
    c.word2_cc += pcc0 && pcc1;
    c.word2_aa += paa0 && paa1;
    c.word3_cc += pcc0 && pcc2;
    c.word3_aa += paa0 && paa2;
    c.ctx_c_cg += pcc0 && rg1;
    c.ctx_a_cg += l[i + 1] == kA && r[i] == kC && rg1;
    c.pair_ca += lc && r[i] == kA;
    c.pair_ct += lc && r[i] == kT;
    c.pair_cg += lc && r[i] == kG;
    c.ctx_c_ta += lc && r[i] == kT && r[i + 1] == kA;
    c.ctx_c_tg += lc && r[i] == kT && rg1;
    c.ctx_c_ca += pcc0 && r[i + 1] == kA;
  }
}

void check_inputs(std::span<const std::uint8_t> left, std::span<const std::uint8_t> right,
                  std::size_t n);

}  // namespace ndsub::simd::detail
