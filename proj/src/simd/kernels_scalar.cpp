#include "tcdnpe/simd/kernels.hpp"

#include <cassert>

namespace tcdnpe::simd::scalar {

std::int64_t dot_i16(std::span<const std::int16_t> a, std::span<const std::int16_t> b) {
    assert(a.size() == b.size());
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::int64_t{a[i]} * std::int64_t{b[i]};
    }
    return acc;
}

void csa_accumulate(std::span<std::uint64_t> sum, std::span<std::uint64_t> carry,
                    std::span<const std::int16_t> a, std::span<const std::int16_t> b,
                    std::uint64_t mask) {
    assert(sum.size() == carry.size() && a.size() == sum.size() && b.size() == sum.size());
    for (std::size_t i = 0; i < sum.size(); ++i) {
        const std::uint64_t x = sum[i];
        const std::uint64_t y = (carry[i] << 1) & mask;
        const std::uint64_t z = static_cast<std::uint64_t>(std::int64_t{a[i]} * b[i]) & mask;
        sum[i] = x ^ y ^ z;
        carry[i] = ((x & y) | (x & z) | (y & z)) & mask;
    }
}

} // namespace tcdnpe::simd::scalar
