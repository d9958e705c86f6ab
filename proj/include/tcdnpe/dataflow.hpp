#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace tcdnpe {

enum class Dataflow {
    OsTcd,  // output stationary on TCD-MACs
    OsConv, // output stationary on conventional MACs
    Nlr,    // no local reuse, conventional MACs as a systolic array
    Rna,    // unrolled multiplier/adder tree over conventional MACs
};

inline constexpr Dataflow kAllDataflows[] = {Dataflow::OsTcd, Dataflow::OsConv, Dataflow::Nlr,
                                             Dataflow::Rna};

constexpr std::string_view to_string(Dataflow d) {
    switch (d) {
    case Dataflow::OsTcd: return "os-tcd";
    case Dataflow::OsConv: return "os-conv";
    case Dataflow::Nlr: return "nlr";
    case Dataflow::Rna: return "rna";
    }
    return "?";
}

constexpr std::optional<Dataflow> parse_dataflow(std::string_view s) {
    for (Dataflow d : kAllDataflows) {
        if (to_string(d) == s) {
            return d;
        }
    }
    return std::nullopt;
}

constexpr bool uses_tcd_mac(Dataflow d) { return d == Dataflow::OsTcd; }

// Access and activity counters produced by the simulator and consumed by the PPA model.
struct EngineCounters {
    std::uint64_t total_cycles = 0;
    std::uint64_t pe_active_cycles = 0;
    std::uint64_t rolls = 0;
    std::uint64_t mac_ops = 0;
    std::uint64_t w_mem_reads = 0;
    std::uint64_t w_mem_writes = 0;
    std::uint64_t fm_mem_reads = 0;
    std::uint64_t fm_mem_writes = 0;
    // NLR only: partial sums spilled to and refetched from the feature memory (row accesses).
    std::uint64_t psum_reads = 0;
    std::uint64_t psum_writes = 0;
    std::uint64_t rlc_bytes_in = 0;

    EngineCounters& operator+=(const EngineCounters& o) {
        total_cycles += o.total_cycles;
        pe_active_cycles += o.pe_active_cycles;
        rolls += o.rolls;
        mac_ops += o.mac_ops;
        w_mem_reads += o.w_mem_reads;
        w_mem_writes += o.w_mem_writes;
        fm_mem_reads += o.fm_mem_reads;
        fm_mem_writes += o.fm_mem_writes;
        psum_reads += o.psum_reads;
        psum_writes += o.psum_writes;
        rlc_bytes_in += o.rlc_bytes_in;
        return *this;
    }

    friend bool operator==(const EngineCounters&, const EngineCounters&) = default;
};

} // namespace tcdnpe
