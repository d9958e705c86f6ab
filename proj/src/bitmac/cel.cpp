#include <bit>

#include "tcdnpe/bitmac/tcd_mac.hpp"

namespace tcdnpe::bitmac {

namespace {

void emit_count(BitColumns& next, int pos, int count, int out_bits) {
    for (int k = 0; k < out_bits; ++k) {
        next.push(pos + k, ((count >> k) & 1) != 0);
    }
}

void pass_through(BitColumns& next, int pos, const Column& col, int first) {
    if (pos < next.width()) {
        next[pos].append_from(col, first);
    }
}

} // namespace

CelResult compress_cel(const BitColumns& cols, std::uint64_t injected_carries) {
    const int width = cols.width();
    const std::uint64_t mask = acc_mask(width);

    // Every CBU register bit is a wire into the next column, zero or not.
    std::uint64_t pending = mask & ~std::uint64_t{1};
    const std::uint64_t carry_values = (injected_carries << 1) & mask;

    CelResult out;
    BitColumns cur = cols;

    for (;;) {
        if (cur.max_height() <= 2) {
            if (pending == 0) {
                break;
            }
            // No incomplete compressor had room: these wires get hardware of their own.
            for (int c = 1; c < width; ++c) {
                if (((pending >> c) & 1U) != 0) {
                    cur[c].push(((carry_values >> c) & 1U) != 0);
                }
            }
            out.stats.carries_appended += std::popcount(pending);
            pending = 0;
            continue;
        }

        BitColumns next(width);
        for (int c = 0; c < width; ++c) {
            const Column& col = cur[c];
            const int h = col.size();
            // Outputs already landed here from columns c - 1 and c - 2 of this layer.
            const int incoming = next[c].size();
            if (h == 2 && incoming > 0) {
                // C(2:2): without it the carry would ripple one column per layer.
                int count = col.ones_in(0, 2);
                if (((pending >> c) & 1U) != 0) {
                    count += static_cast<int>((carry_values >> c) & 1U);
                    pending &= ~(std::uint64_t{1} << c);
                    ++out.stats.carries_absorbed;
                }
                emit_count(next, c, count, 2);
                ++out.stats.incomplete;
                continue;
            }
            if (h <= 2) {
                pass_through(next, c, col, 0);
                continue;
            }
            int pos = 0;
            while (h - pos >= 7) {
                emit_count(next, c, col.ones_in(pos, 7), 3);
                ++out.stats.complete_7_3;
                pos += 7;
            }
            const int rem = h - pos;
            if (rem >= 4) {
                int count = col.ones_in(pos, rem);
                if (((pending >> c) & 1U) != 0) {
                    count += static_cast<int>((carry_values >> c) & 1U);
                    pending &= ~(std::uint64_t{1} << c);
                    ++out.stats.carries_absorbed;
                }
                emit_count(next, c, count, 3);
                ++out.stats.incomplete;
            } else if (rem == 3) {
                emit_count(next, c, col.ones_in(pos, 3), 2);
                ++out.stats.complete_3_2;
            } else {
                pass_through(next, c, col, pos);
            }
        }
        cur = next;
        ++out.stats.layers;
    }

    for (int c = 0; c < width; ++c) {
        const Column& col = cur[c];
        if (col.size() >= 1 && col.bit(0)) {
            out.row_a |= std::uint64_t{1} << c;
        }
        if (col.size() >= 2 && col.bit(1)) {
            out.row_b |= std::uint64_t{1} << c;
        }
    }
    return out;
}

GenResult gen_stage(std::uint64_t row_a, std::uint64_t row_b, int width) {
    const std::uint64_t mask = acc_mask(width);
    return {(row_a ^ row_b) & mask, (row_a & row_b) & mask};
}

std::uint64_t pcpa(std::uint64_t propagate, std::uint64_t generate, int width) {
    const std::uint64_t shifted = generate << 1;
    std::uint64_t carry = 0;
    std::uint64_t out = 0;
    for (int i = 0; i < width; ++i) {
        const std::uint64_t p = (propagate >> i) & 1U;
        const std::uint64_t g = (shifted >> i) & 1U;
        out |= (p ^ g ^ carry) << i;
        carry = (p & g) | (carry & (p ^ g));
    }
    return out;
}

} // namespace tcdnpe::bitmac
