#include "tcdnpe/ppamodel/ppa.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "tcdnpe/error.hpp"

namespace tcdnpe::ppa {

namespace {

const std::array<MacPpa, 9> kMacTable{{
    {"(BRx2, KS)", 8357, 467, 2.85, 13.31},
    {"(BRx2, BK)", 8122, 394, 3.3, 13},
    {"(BRx8, BK)", 7281, 383, 3.14, 12.03},
    {"(BRx4, BK)", 6437, 347, 3.35, 11.62},
    {"(WAL, KS)", 7171, 346, 3.04, 10.52},
    {"(WAL, BK)", 6520, 334, 3.13, 10.45},
    {"(BRx4, KS)", 6551, 393, 2.47, 9.71},
    {"(BRx8, KS)", 7342, 354, 2.63, 9.31},
    {"TCD-MAC", 5004, 320, 1.57, 5.02},
}};

std::string normalize(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_number(std::string_view key, std::string_view text) {
    text = trim(text);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw FormatError("PPA key '" + std::string(key) + "': '" + std::string(text) + "' is not a number");
    }
    if (v < 0) {
        throw FormatError("PPA key '" + std::string(key) + "' must be non-negative");
    }
    return v;
}

// Extra MAC rows from mac.<name> keys, looked up before the built-in table.
struct MacRegistry {
    std::vector<MacPpa> rows;

    std::optional<MacPpa> find(std::string_view name) const {
        const std::string key = normalize(name);
        for (const MacPpa& m : rows) {
            if (normalize(m.name) == key) {
                return m;
            }
        }
        return find_mac(name);
    }
};

void apply(EnginePpa& ppa, MacRegistry& reg, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key.starts_with("mac.")) {
        MacPpa m;
        m.name = std::string(trim(key.substr(4)));
        double* fields[] = {&m.area_um2, &m.power_uw, &m.delay_ns, &m.pdp_pj};
        std::size_t idx = 0;
        std::string_view rest = value;
        while (idx < 4) {
            const std::size_t comma = rest.find(',');
            *fields[idx++] = parse_number(key, rest.substr(0, comma));
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
        }
        if (idx != 4 || rest.find(',') != std::string_view::npos || m.power_uw <= 0 || m.delay_ns <= 0) {
            throw FormatError("PPA key '" + std::string(key) +
                              "' needs four positive values: area_um2, power_uw, delay_ns, pdp_pj");
        }
        std::erase_if(reg.rows, [&](const MacPpa& r) { return normalize(r.name) == normalize(m.name); });
        reg.rows.push_back(m);
        if (normalize(ppa.tcd_mac.name) == normalize(m.name)) {
            ppa.tcd_mac = m;
        }
        if (normalize(ppa.conv_mac.name) == normalize(m.name)) {
            ppa.conv_mac = m;
        }
        return;
    }
    if (key == "tcd_mac" || key == "conv_mac") {
        const auto m = reg.find(value);
        if (!m) {
            throw FormatError("PPA key '" + std::string(key) + "': unknown MAC '" + std::string(value) + "'");
        }
        (key == "tcd_mac" ? ppa.tcd_mac : ppa.conv_mac) = *m;
        return;
    }
    struct Field {
        std::string_view name;
        double EnginePpa::*member;
    };
    static constexpr Field kFields[] = {
        {"clock_mhz", &EnginePpa::clock_mhz},
        {"pe_leak_mw", &EnginePpa::pe_leak_mw},
        {"mem_leak_mw", &EnginePpa::mem_leak_mw},
        {"other_leak_mw", &EnginePpa::other_leak_mw},
        {"mem_read_energy_pj", &EnginePpa::mem_read_energy_pj},
        {"mem_write_energy_pj", &EnginePpa::mem_write_energy_pj},
        {"nlr_writeback_cycles", &EnginePpa::nlr_writeback_cycles},
    };
    for (const Field& f : kFields) {
        if (key == f.name) {
            ppa.*(f.member) = parse_number(key, value);
            return;
        }
    }
    throw FormatError("unknown PPA key '" + std::string(key) + "'");
}

std::string fmt_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

std::span<const MacPpa> mac_table() { return kMacTable; }

std::optional<MacPpa> find_mac(std::string_view name) {
    const std::string key = normalize(name);
    for (const MacPpa& m : kMacTable) {
        if (normalize(m.name) == key) {
            return m;
        }
    }
    return std::nullopt;
}

std::vector<Improvement> improvement_table(const MacPpa& tcd, const MacPpa& conv, std::span<const int> stream_sizes) {
    std::vector<Improvement> out;
    for (int s : stream_sizes) {
        if (s < 1) {
            throw ConfigError("stream size must be >= 1");
        }
        const double extra = static_cast<double>(s + 1) / s;
        out.push_back({s, 100.0 * (1.0 - extra * tcd.pdp_pj / conv.pdp_pj),
                       100.0 * (1.0 - extra * tcd.delay_ns / conv.delay_ns)});
    }
    return out;
}

EnginePpa default_engine_ppa() {
    EnginePpa p;
    p.tcd_mac = *find_mac("TCD-MAC");
    p.conv_mac = *find_mac("(BRx4, KS)");
    return p;
}

EnginePpa parse_ppa(std::string_view text, EnginePpa base) {
    MacRegistry reg;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw FormatError("PPA line " + std::to_string(line_no) + ": expected key = value");
        }
        apply(base, reg, line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

void apply_ppa_setting(EnginePpa& ppa, std::string_view key, std::string_view value) {
    MacRegistry reg;
    apply(ppa, reg, key, value);
}

EnginePpa load_ppa_file(const std::string& path, EnginePpa base) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open PPA file " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_ppa(ss.str(), std::move(base));
}

std::string format_ppa(const EnginePpa& ppa) {
    std::ostringstream out;
    auto emit_mac = [](std::ostream& o, const MacPpa& m) {
        o << "mac." << m.name << " = " << fmt_double(m.area_um2) << ", " << fmt_double(m.power_uw) << ", "
          << fmt_double(m.delay_ns) << ", " << fmt_double(m.pdp_pj) << '\n';
    };
    for (const MacPpa& m : kMacTable) {
        emit_mac(out, m);
    }
    for (const MacPpa* m : {&ppa.tcd_mac, &ppa.conv_mac}) {
        if (const auto builtin = find_mac(m->name); !builtin || !(*builtin == *m)) {
            emit_mac(out, *m);
        }
    }
    out << "tcd_mac = " << ppa.tcd_mac.name << '\n'
        << "conv_mac = " << ppa.conv_mac.name << '\n'
        << "clock_mhz = " << fmt_double(ppa.clock_mhz) << '\n'
        << "pe_leak_mw = " << fmt_double(ppa.pe_leak_mw) << '\n'
        << "mem_leak_mw = " << fmt_double(ppa.mem_leak_mw) << '\n'
        << "other_leak_mw = " << fmt_double(ppa.other_leak_mw) << '\n'
        << "# assumed, per row access\n"
        << "mem_read_energy_pj = " << fmt_double(ppa.mem_read_energy_pj) << '\n'
        << "mem_write_energy_pj = " << fmt_double(ppa.mem_write_energy_pj) << '\n'
        << "# approximate\n"
        << "nlr_writeback_cycles = " << fmt_double(ppa.nlr_writeback_cycles) << '\n';
    return out.str();
}

std::uint64_t rna_layer_ops(int batches, int inputs, int neurons) {
    const auto bu = static_cast<std::uint64_t>(batches) * static_cast<std::uint64_t>(neurons);
    return bu * (2 * static_cast<std::uint64_t>(inputs) - 1);
}

std::uint64_t rna_layer_cycles(int batches, int inputs, int neurons, int pes) {
    if (batches < 1 || inputs < 1 || neurons < 1 || pes < 1) {
        throw ConfigError("rna_layer_cycles: all arguments must be >= 1");
    }
    const auto bu = static_cast<std::uint64_t>(batches) * static_cast<std::uint64_t>(neurons);
    const auto p = static_cast<std::uint64_t>(pes);
    auto stage = [&](std::uint64_t ops_per_neuron) { return (bu * ops_per_neuron + p - 1) / p; };

    std::uint64_t cycles = stage(static_cast<std::uint64_t>(inputs)); // multipliers
    for (auto terms = static_cast<std::uint64_t>(inputs); terms > 1; terms = (terms + 1) / 2) {
        cycles += stage(terms / 2); // one adder level
    }
    return cycles;
}

double time_report(const EngineCounters& counters, const EnginePpa& ppa, Dataflow dataflow) {
    const auto cycles = static_cast<double>(counters.total_cycles);
    switch (dataflow) {
    case Dataflow::OsTcd:
    case Dataflow::OsConv:
    case Dataflow::Rna:
        return cycles * ppa.cycle_ns(dataflow);
    case Dataflow::Nlr:
        return cycles * (1.0 + ppa.nlr_writeback_cycles) * ppa.cycle_ns(dataflow);
    }
    throw ConfigError("unknown dataflow");
}

EnergyReport energy_report(const EngineCounters& counters, const EnginePpa& ppa, Dataflow dataflow) {
    EnergyReport r;
    r.exec_time_ns = time_report(counters, ppa, dataflow);
    r.pe_dynamic_pj = static_cast<double>(counters.pe_active_cycles) * ppa.pe_dyn_energy_pj(dataflow);
    // mW x ns = pJ
    r.pe_leakage_pj = ppa.pe_leak_mw * r.exec_time_ns;
    r.mem_leakage_pj = ppa.mem_leak_mw * r.exec_time_ns;
    r.other_leakage_pj = ppa.other_leak_mw * r.exec_time_ns;
    const auto reads = static_cast<double>(counters.w_mem_reads + counters.fm_mem_reads + counters.psum_reads);
    const auto writes = static_cast<double>(counters.w_mem_writes + counters.fm_mem_writes + counters.psum_writes);
    r.mem_dynamic_pj = reads * ppa.mem_read_energy_pj + writes * ppa.mem_write_energy_pj;
    r.total_pj = r.pe_dynamic_pj + r.pe_leakage_pj + r.mem_leakage_pj + r.mem_dynamic_pj + r.other_leakage_pj;
    return r;
}

} // namespace tcdnpe::ppa
