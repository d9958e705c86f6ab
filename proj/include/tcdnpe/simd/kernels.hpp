#pragma once

// Data-parallel inner loops of the simulator. Every kernel has a scalar
// reference in simd::scalar and, on x86-64, an AVX2 variant in simd::avx2.
// The unqualified entry points dispatch at runtime on the detected ISA;
// TCDNPE_SIMD=scalar in the environment forces the reference path.

#include <cstdint>
#include <span>
#include <string_view>

namespace tcdnpe::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

// Best ISA supported by this CPU and build.
Isa detected_isa();
// ISA used by the dispatching entry points.
Isa active_isa();
// Overrides the dispatch choice. Requesting an unsupported ISA falls back to Scalar.
void set_active_isa(Isa isa);

// Exact sum of a[i] * b[i] in 64-bit arithmetic.
std::int64_t dot_i16(std::span<const std::int16_t> a, std::span<const std::int16_t> b);

// Lane-parallel carry-save accumulate, one lane per PE:
//   x = sum, y = carry << 1, z = a * b   (all reduced by mask)
//   sum' = x ^ y ^ z,  carry' = majority(x, y, z)
// sum + 2 * carry stays congruent to the running dot product modulo mask + 1.
void csa_accumulate(std::span<std::uint64_t> sum, std::span<std::uint64_t> carry,
                    std::span<const std::int16_t> a, std::span<const std::int16_t> b,
                    std::uint64_t mask);

namespace scalar {
std::int64_t dot_i16(std::span<const std::int16_t> a, std::span<const std::int16_t> b);
void csa_accumulate(std::span<std::uint64_t> sum, std::span<std::uint64_t> carry,
                    std::span<const std::int16_t> a, std::span<const std::int16_t> b,
                    std::uint64_t mask);
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define TCDNPE_HAVE_AVX2_KERNELS 1
namespace avx2 {
std::int64_t dot_i16(std::span<const std::int16_t> a, std::span<const std::int16_t> b);
void csa_accumulate(std::span<std::uint64_t> sum, std::span<std::uint64_t> carry,
                    std::span<const std::int16_t> a, std::span<const std::int16_t> b,
                    std::uint64_t mask);
} // namespace avx2
#endif

} // namespace tcdnpe::simd
