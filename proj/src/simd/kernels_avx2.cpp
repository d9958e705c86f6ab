#include "tcdnpe/simd/kernels.hpp"

#include <cassert>
#include <immintrin.h>

namespace tcdnpe::simd::avx2 {

std::int64_t dot_i16(std::span<const std::int16_t> a, std::span<const std::int16_t> b) {
    assert(a.size() == b.size());
    const std::size_t n = a.size();
    std::size_t i = 0;

    // Products are widened to 32 bits before any addition: madd_epi16 would
    // overflow on (-32768 * -32768) * 2.
    __m256i acc_lo = _mm256_setzero_si256();
    __m256i acc_hi = _mm256_setzero_si256();
    for (; i + 8 <= n; i += 8) {
        const __m128i va = _mm_loadu_si128(reinterpret_cast<const __m128i*>(a.data() + i));
        const __m128i vb = _mm_loadu_si128(reinterpret_cast<const __m128i*>(b.data() + i));
        const __m256i prod = _mm256_mullo_epi32(_mm256_cvtepi16_epi32(va), _mm256_cvtepi16_epi32(vb));
        acc_lo = _mm256_add_epi64(acc_lo, _mm256_cvtepi32_epi64(_mm256_castsi256_si128(prod)));
        acc_hi = _mm256_add_epi64(acc_hi, _mm256_cvtepi32_epi64(_mm256_extracti128_si256(prod, 1)));
    }

    alignas(32) std::int64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), _mm256_add_epi64(acc_lo, acc_hi));
    std::int64_t acc = lanes[0] + lanes[1] + lanes[2] + lanes[3];

    for (; i < n; ++i) {
        acc += std::int64_t{a[i]} * std::int64_t{b[i]};
    }
    return acc;
}

void csa_accumulate(std::span<std::uint64_t> sum, std::span<std::uint64_t> carry,
                    std::span<const std::int16_t> a, std::span<const std::int16_t> b,
                    std::uint64_t mask) {
    assert(sum.size() == carry.size() && a.size() == sum.size() && b.size() == sum.size());
    const std::size_t n = sum.size();
    const __m256i vmask = _mm256_set1_epi64x(static_cast<long long>(mask));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        std::int64_t a4;
        std::int64_t b4;
        __builtin_memcpy(&a4, a.data() + i, sizeof a4);
        __builtin_memcpy(&b4, b.data() + i, sizeof b4);
        // Sign-extended operands in the low dword of each 64-bit lane; mul_epi32 gives the exact product.
        const __m256i va = _mm256_cvtepi16_epi64(_mm_cvtsi64_si128(a4));
        const __m256i vb = _mm256_cvtepi16_epi64(_mm_cvtsi64_si128(b4));
        const __m256i z = _mm256_and_si256(_mm256_mul_epi32(va, vb), vmask);

        auto* sp = reinterpret_cast<__m256i*>(sum.data() + i);
        auto* cp = reinterpret_cast<__m256i*>(carry.data() + i);
        const __m256i x = _mm256_loadu_si256(sp);
        const __m256i y = _mm256_and_si256(_mm256_slli_epi64(_mm256_loadu_si256(cp), 1), vmask);

        const __m256i s = _mm256_xor_si256(_mm256_xor_si256(x, y), z);
        const __m256i c = _mm256_or_si256(_mm256_and_si256(x, y),
                                          _mm256_and_si256(z, _mm256_or_si256(x, y)));
        _mm256_storeu_si256(sp, s);
        _mm256_storeu_si256(cp, _mm256_and_si256(c, vmask));
    }
    if (i < n) {
        scalar::csa_accumulate(sum.subspan(i), carry.subspan(i), a.subspan(i), b.subspan(i), mask);
    }
}

} // namespace tcdnpe::simd::avx2
