#pragma once

#include <cstdint>

namespace tcdnpe {

// Raw two's complement 16-bit operand. The Q-format only matters to quantize_relu.
using FixedWord = std::int16_t;

inline constexpr int kOperandBits = 16;
// 32-bit full product plus 16 guard bits: streams of up to 2^16 terms never wrap.
inline constexpr int kAccBits = 48;
inline constexpr int kMaxAccBits = 63;

inline constexpr FixedWord kFixedMax = 32767;

struct OperandPair {
    FixedWord a = 0;
    FixedWord b = 0;
};

constexpr std::uint64_t acc_mask(int bits) {
    return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

// Interprets the low `bits` of v as a two's complement number.
constexpr std::int64_t sign_extend(std::uint64_t v, int bits) {
    const std::uint64_t m = acc_mask(bits);
    v &= m;
    const std::uint64_t sign = std::uint64_t{1} << (bits - 1);
    return static_cast<std::int64_t>((v ^ sign) - sign);
}

// Reduces a signed value into `bits` wide two's complement and back.
constexpr std::int64_t wrap_to(std::int64_t v, int bits) {
    return sign_extend(static_cast<std::uint64_t>(v), bits);
}

struct QuantConfig {
    // Fraction bits dropped from the accumulator; 8 for Q8.8 x Q8.8 -> Q8.8.
    int shift = 8;
};

// ReLU, then arithmetic shift right (truncating), then saturate into [0, 32767].
constexpr FixedWord quantize_relu(std::int64_t acc, QuantConfig q = {}) {
    if (acc <= 0) {
        return 0;
    }
    const std::int64_t shifted = acc >> q.shift;
    return shifted > kFixedMax ? kFixedMax : static_cast<FixedWord>(shifted);
}

} // namespace tcdnpe
