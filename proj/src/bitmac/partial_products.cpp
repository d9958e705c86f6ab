#include <cassert>

#include "tcdnpe/bitmac/tcd_mac.hpp"

namespace tcdnpe::bitmac {

BitColumns gen_partial_products(std::int32_t a, std::int32_t b, const MacGeometry& geom) {
    const int w = geom.operand_bits;
    const int width = geom.acc_bits;
    assert(a >= geom.min_operand() && a <= geom.max_operand());
    assert(b >= geom.min_operand() && b <= geom.max_operand());

    BitColumns cols(width);
    const std::uint64_t operand_mask = acc_mask(w);

    if (a < 0 && b < 0) {
        // (-a) * (-b): both magnitudes fit w unsigned bits, every row is a plain AND row.
        const auto m = static_cast<std::uint64_t>(-std::int64_t{a});
        const auto x = static_cast<std::uint64_t>(-std::int64_t{b});
        for (int i = 0; i < w; ++i) {
            cols.push_row(((x >> i) & 1U) != 0 ? m : 0, i, w);
        }
        return cols;
    }

    // The negative operand, if any, drives the rows; the other one is the multiplicand.
    const std::int32_t multiplier = a < 0 ? a : b;
    const std::int32_t multiplicand = a < 0 ? b : a;
    const std::uint64_t x = static_cast<std::uint64_t>(static_cast<std::int64_t>(multiplier)) & operand_mask;
    const auto m = static_cast<std::uint64_t>(multiplicand);

    for (int i = 0; i < w - 1; ++i) {
        cols.push_row(((x >> i) & 1U) != 0 ? m : 0, i, w);
    }

    const int top = w - 1;
    if (multiplier < 0) {
        // -2^(w-1) * m: two's complement of the multiplicand, shifted into the sign position.
        const int span = width - top;
        const std::uint64_t neg = static_cast<std::uint64_t>(-static_cast<std::int64_t>(m)) & acc_mask(span);
        cols.push_row(neg, top, span);
    } else {
        cols.push_row(0, top, w);
    }
    return cols;
}

int hwc_output_width(int m) {
    assert(m >= 1);
    return std::bit_width(static_cast<unsigned>(m));
}

HwcOutput hwc(std::span<const std::uint8_t> bits) {
    assert(!bits.empty());
    std::uint32_t count = 0;
    for (std::uint8_t b : bits) {
        count += b != 0 ? 1U : 0U;
    }
    return {count, hwc_output_width(static_cast<int>(bits.size()))};
}

} // namespace tcdnpe::bitmac
