#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tcdnpe/bitmac/bit_columns.hpp"
#include "tcdnpe/fixed.hpp"

namespace tcdnpe::bitmac {

// Operand and accumulator widths of a MAC instance. Production units are 16/48;
// narrow variants exist so the whole operand space can be enumerated in tests.
struct MacGeometry {
    int operand_bits = kOperandBits;
    int acc_bits = kAccBits;

    std::int32_t min_operand() const { return -(std::int32_t{1} << (operand_bits - 1)); }
    std::int32_t max_operand() const { return (std::int32_t{1} << (operand_bits - 1)) - 1; }
    std::uint64_t mask() const { return acc_mask(acc_bits); }
};

// ---- Data reshape unit ---------------------------------------------------

// Partial-product columns of a * b. A negative operand is always the
// multiplier; its sign weight contributes the two's complement of the
// multiplicand shifted left by operand_bits - 1 as one extra row. When both
// operands are negative both are negated first and the rows are unsigned.
BitColumns gen_partial_products(std::int32_t a, std::int32_t b, const MacGeometry& geom = {});

// ---- Hamming weight compressor ------------------------------------------

struct HwcOutput {
    std::uint32_t count = 0; // population count of the inputs
    int width = 0;           // output bits, ceil(log2(m + 1))
};

int hwc_output_width(int m);
// bits[k] is 0 or 1.
HwcOutput hwc(std::span<const std::uint8_t> bits);

// ---- Compression and expansion layer ------------------------------------

struct CelStats {
    int layers = 0;
    int complete_7_3 = 0;
    int complete_3_2 = 0;
    int incomplete = 0;          // C(2:2), C(4:3), C(5:3), C(6:3)
    int carries_absorbed = 0;    // carry bits placed into spare inputs of an incomplete compressor
    int carries_appended = 0;    // carry bits that found no spare input and required extra hardware
};

struct CelResult {
    std::uint64_t row_a = 0;
    std::uint64_t row_b = 0;
    CelStats stats;
};

// Reduces every column to at most two bits. Carry bit i of `injected_carries`
// (a generate bit from column i of the previous cycle) enters column i + 1.
// row_a + row_b == cols + (injected_carries << 1) modulo 2^width.
CelResult compress_cel(const BitColumns& cols, std::uint64_t injected_carries);

// ---- Carry-propagate adder, split --------------------------------------

struct GenResult {
    std::uint64_t propagate = 0; // P_i = a_i ^ b_i
    std::uint64_t generate = 0;  // G_i = a_i & b_i, worth 2^(i+1)
};

GenResult gen_stage(std::uint64_t row_a, std::uint64_t row_b, int width = kAccBits);

// P + (G << 1) modulo 2^width, by rippling the carry through every position.
std::uint64_t pcpa(std::uint64_t propagate, std::uint64_t generate, int width = kAccBits);

// ---- TCD-MAC --------------------------------------------------------------

enum class MacMode {
    CarryDeferring,   // CDM
    CarryPropagating, // CPM: closes the stream
};

struct TcdMacState {
    std::uint64_t oru = 0; // propagate bits of the last cycle
    std::uint64_t cbu = 0; // deferred generate bits; bit i is worth 2^(i+1)
    std::uint64_t cycle_count = 0;

    // oru + 2 * cbu modulo 2^width: equals the exact running sum after every CDM cycle.
    std::uint64_t deferred_value(int width = kAccBits) const {
        return (oru + (cbu << 1)) & acc_mask(width);
    }

    friend bool operator==(const TcdMacState&, const TcdMacState&) = default;
};

struct StepResult {
    TcdMacState state;
    std::optional<std::int64_t> value; // set by CPM only
    CelStats cel;
};

// One TCD-MAC cycle. In CPM the operands are ignored, the carry chain is
// closed and the state is cleared.
StepResult tcd_mac_step(const TcdMacState& state, std::int32_t a, std::int32_t b, MacMode mode,
                        const MacGeometry& geom = {});

class TcdMac {
public:
    explicit TcdMac(MacGeometry geom = {}) : geom_(geom) {}

    void accumulate(std::int32_t a, std::int32_t b);
    std::int64_t finish();
    void reset() { state_ = {}; }

    const TcdMacState& state() const { return state_; }
    const MacGeometry& geometry() const { return geom_; }
    const CelStats& last_cel() const { return last_cel_; }

private:
    MacGeometry geom_;
    TcdMacState state_;
    CelStats last_cel_;
};

struct StreamResult {
    std::int64_t value = 0;
    std::uint64_t cycles = 0;

    friend bool operator==(const StreamResult&, const StreamResult&) = default;
};

// N CDM cycles followed by one CPM cycle; an empty stream costs nothing.
StreamResult tcd_mac_stream(std::span<const OperandPair> pairs, const MacGeometry& geom = {});

// Behavioural multiply-then-add MAC: one cycle per pair, correct partial sum every cycle.
class ConvMac {
public:
    explicit ConvMac(MacGeometry geom = {}) : geom_(geom) {}

    void accumulate(std::int32_t a, std::int32_t b) {
        acc_ = wrap_to(acc_ + std::int64_t{a} * b, geom_.acc_bits);
        ++cycles_;
    }
    std::int64_t finish() {
        const std::int64_t v = acc_;
        acc_ = 0;
        return v;
    }
    std::int64_t value() const { return acc_; }
    std::uint64_t cycles() const { return cycles_; }

private:
    MacGeometry geom_;
    std::int64_t acc_ = 0;
    std::uint64_t cycles_ = 0;
};

StreamResult conv_mac_stream(std::span<const OperandPair> pairs, const MacGeometry& geom = {});

} // namespace tcdnpe::bitmac
