#include "tcdnpe/bitmac/tcd_mac.hpp"

namespace tcdnpe::bitmac {

StepResult tcd_mac_step(const TcdMacState& state, std::int32_t a, std::int32_t b, MacMode mode,
                        const MacGeometry& geom) {
    const int width = geom.acc_bits;
    StepResult out;
    if (mode == MacMode::CarryPropagating) {
        out.value = sign_extend(pcpa(state.oru, state.cbu, width), width);
        return out;
    }

    BitColumns cols = gen_partial_products(a, b, geom);
    // Last cycle's propagate bits re-enter as one more row; its generate bits are injected by the CEL.
    cols.push_row(state.oru, 0, width);
    const CelResult cel = compress_cel(cols, state.cbu);
    const GenResult gen = gen_stage(cel.row_a, cel.row_b, width);

    out.state = {gen.propagate, gen.generate, state.cycle_count + 1};
    out.cel = cel.stats;
    return out;
}

void TcdMac::accumulate(std::int32_t a, std::int32_t b) {
    StepResult r = tcd_mac_step(state_, a, b, MacMode::CarryDeferring, geom_);
    state_ = r.state;
    last_cel_ = r.cel;
}

std::int64_t TcdMac::finish() {
    StepResult r = tcd_mac_step(state_, 0, 0, MacMode::CarryPropagating, geom_);
    state_ = r.state;
    return *r.value;
}

StreamResult tcd_mac_stream(std::span<const OperandPair> pairs, const MacGeometry& geom) {
    if (pairs.empty()) {
        return {};
    }
    TcdMac mac(geom);
    for (const OperandPair& p : pairs) {
        mac.accumulate(p.a, p.b);
    }
    return {mac.finish(), pairs.size() + 1};
}

StreamResult conv_mac_stream(std::span<const OperandPair> pairs, const MacGeometry& geom) {
    ConvMac mac(geom);
    for (const OperandPair& p : pairs) {
        mac.accumulate(p.a, p.b);
    }
    return {mac.finish(), mac.cycles()};
}

} // namespace tcdnpe::bitmac
