#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tcdnpe/dataflow.hpp"

namespace tcdnpe::ppa {

// One row of the MAC comparison table (32nm, post-layout).
struct MacPpa {
    std::string name;
    double area_um2 = 0;
    double power_uw = 0;
    double delay_ns = 0;
    double pdp_pj = 0; // as tabulated (power x delay x 10)

    // Dynamic energy of one active cycle at this MAC's own clock: power x delay.
    double energy_per_cycle_pj() const { return power_uw * delay_ns * 1e-3; }

    friend bool operator==(const MacPpa&, const MacPpa&) = default;
};

// TCD-MAC plus the eight conventional (multiplier, adder) MACs.
std::span<const MacPpa> mac_table();
// Case-insensitive, whitespace-insensitive lookup, e.g. "(brx4,ks)".
std::optional<MacPpa> find_mac(std::string_view name);

struct Improvement {
    int stream_size = 0;
    double throughput_pct = 0;
    double energy_pct = 0;
};

// Per stream size S:
//   throughput_pct = 100 * (1 - (S + 1) * tcd.pdp   / (S * conv.pdp))
//   energy_pct     = 100 * (1 - (S + 1) * tcd.delay / (S * conv.delay))
// The first column is the PDP ratio and the second the delay ratio; the
// reference improvement table labels them this way round.
std::vector<Improvement> improvement_table(const MacPpa& tcd, const MacPpa& conv, std::span<const int> stream_sizes);

struct EnginePpa {
    MacPpa tcd_mac;
    MacPpa conv_mac;
    double clock_mhz = 636;
    double pe_leak_mw = 6.4;
    double mem_leak_mw = 51.7;
    double other_leak_mw = 17;
    // Assumed per row access at the 0.70 V memory domain.
    double mem_read_energy_pj = 10;
    double mem_write_energy_pj = 10;
    // NLR: memory-bound partial-sum writeback cycles per array MAC cycle (approximate).
    double nlr_writeback_cycles = 1.0;

    const MacPpa& mac_for(Dataflow d) const { return uses_tcd_mac(d) ? tcd_mac : conv_mac; }
    double pe_dyn_energy_pj(Dataflow d) const { return mac_for(d).energy_per_cycle_pj(); }
    double cycle_ns(Dataflow d) const { return mac_for(d).delay_ns; }
};

// TCD-MAC against the fastest conventional MAC, (BRx4, KS), with the
// implementation's leakage figures.
EnginePpa default_engine_ppa();

// Key-value text, one `key = value` per line, `#` comments. Keys:
//   clock_mhz pe_leak_mw mem_leak_mw other_leak_mw mem_read_energy_pj
//   mem_write_energy_pj nlr_writeback_cycles tcd_mac conv_mac
//   mac.<name> = area_um2, power_uw, delay_ns, pdp_pj
// tcd_mac / conv_mac name a MAC row; mac.<name> adds or replaces one.
// Unknown keys and malformed values throw FormatError.
EnginePpa parse_ppa(std::string_view text, EnginePpa base = default_engine_ppa());
void apply_ppa_setting(EnginePpa& ppa, std::string_view key, std::string_view value);
EnginePpa load_ppa_file(const std::string& path, EnginePpa base = default_engine_ppa());
std::string format_ppa(const EnginePpa& ppa);

// Cycles of one layer on the unrolled multiplier/adder tree: one multiply
// stage then ceil(log2 I) adder stages, each limited to `pes` operations per cycle.
std::uint64_t rna_layer_cycles(int batches, int inputs, int neurons, int pes);
// Operations (multiplies plus adds) of the same layer.
std::uint64_t rna_layer_ops(int batches, int inputs, int neurons);

double time_report(const EngineCounters& counters, const EnginePpa& ppa, Dataflow dataflow);

struct EnergyReport {
    double pe_dynamic_pj = 0;
    double pe_leakage_pj = 0;
    double mem_leakage_pj = 0;
    double mem_dynamic_pj = 0;
    double other_leakage_pj = 0;
    double total_pj = 0;
    double exec_time_ns = 0;
};

EnergyReport energy_report(const EngineCounters& counters, const EnginePpa& ppa, Dataflow dataflow);

} // namespace tcdnpe::ppa
