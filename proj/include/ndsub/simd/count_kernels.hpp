#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace ndsub::simd {

/// Site counts over an aligned pair, indexed by the leftmost site i of each word.
/// L* refers to the left sequence, R* to the right one.
struct AlignmentCounts {
  std::uint64_t letter_c = 0;   // L[i]=C
  std::uint64_t letter_a = 0;   // L[i]=A
  std::uint64_t pair_cc = 0;    // L[i]=R[i]=C
  std::uint64_t pair_aa = 0;    // L[i]=R[i]=A
  std::uint64_t word2_cc = 0;   // CC in both at i
  std::uint64_t word2_aa = 0;   // AA in both at i
  std::uint64_t word3_cc = 0;   // C*C in both at i
  std::uint64_t word3_aa = 0;   // A*A in both at i
  std::uint64_t ctx_c_cg = 0;   // L[i]=C, R[i..i+1]=CG
  std::uint64_t ctx_a_cg = 0;   // L[i+1]=A, R[i..i+1]=CG
  std::uint64_t pair_ca = 0;    // L[i]=C, R[i]=A
  std::uint64_t pair_ct = 0;
  std::uint64_t pair_cg = 0;
  std::uint64_t ctx_c_ta = 0;   // L[i]=C, R[i..i+1]=TA
  std::uint64_t ctx_c_tg = 0;
  std::uint64_t ctx_c_ca = 0;

  AlignmentCounts& operator+=(const AlignmentCounts& o);
  bool operator==(const AlignmentCounts&) const = default;
};

enum class Isa { Scalar, Avx2 };

const char* to_string(Isa isa);

/// Whether this build contains the variant and the running CPU can execute it.
bool isa_available(Isa isa);

/// Best available variant. NDSUB_SIMD=scalar in the environment forces the
/// scalar reference.
Isa active_isa();

// All variants take nucleotide codes (A=0, T=1, C=2, G=3) for sites 0..n+1,
// i.e. the circular sequence with its first two sites appended; n >= 3.
AlignmentCounts count_alignment_scalar(std::span<const std::uint8_t> left,
                                       std::span<const std::uint8_t> right, std::size_t n);
#ifdef NDSUB_HAVE_AVX2
AlignmentCounts count_alignment_avx2(std::span<const std::uint8_t> left,
                                     std::span<const std::uint8_t> right, std::size_t n);
#endif

AlignmentCounts count_alignment(std::span<const std::uint8_t> left,
                                std::span<const std::uint8_t> right, std::size_t n,
                                Isa isa = active_isa());

}  // namespace ndsub::simd
