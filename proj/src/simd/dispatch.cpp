#include <cstdlib>
#include <cstring>

#include "count_common.hpp"

namespace ndsub::simd {

const char* to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(NDSUB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  static const Isa isa = [] {
    const char* forced = std::getenv("NDSUB_SIMD");
    if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return Isa::Scalar;
    return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
  }();
  return isa;
}

AlignmentCounts count_alignment(std::span<const std::uint8_t> left,
                                std::span<const std::uint8_t> right, std::size_t n, Isa isa) {
#ifdef NDSUB_HAVE_AVX2
  if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) return count_alignment_avx2(left, right, n);
#endif
  (void)isa;
  return count_alignment_scalar(left, right, n);
}

}  // namespace ndsub::simd
