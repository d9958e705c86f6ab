#include "tcdnpe/cli/run.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <variant>

#include <json.hpp>

#include "tcdnpe/error.hpp"

namespace tcdnpe::cli {
namespace {

using Value = std::variant<std::string, std::uint64_t, double, bool>;

struct Field {
    const char* name;
    std::function<Value(const RunResult&)> get;
};

// The per-run summary shared by the CSV rows and the JSON "runs" entries.
const std::vector<Field>& summary_fields() {
    static const std::vector<Field> fields = {
        {"benchmark", [](const RunResult& r) { return Value{r.benchmark}; }},
        {"topology", [](const RunResult& r) { return Value{r.topology}; }},
        {"batches", [](const RunResult& r) { return Value{static_cast<std::uint64_t>(r.batches)}; }},
        {"dataflow", [](const RunResult& r) { return Value{std::string(to_string(r.dataflow))}; }},
        {"rolls", [](const RunResult& r) { return Value{r.counters.rolls}; }},
        {"cycles", [](const RunResult& r) { return Value{r.counters.total_cycles}; }},
        {"exec_ns", [](const RunResult& r) { return Value{r.energy.exec_time_ns}; }},
        {"pe_dynamic_pj", [](const RunResult& r) { return Value{r.energy.pe_dynamic_pj}; }},
        {"pe_leakage_pj", [](const RunResult& r) { return Value{r.energy.pe_leakage_pj}; }},
        {"mem_leakage_pj", [](const RunResult& r) { return Value{r.energy.mem_leakage_pj}; }},
        {"mem_dynamic_pj", [](const RunResult& r) { return Value{r.energy.mem_dynamic_pj}; }},
        {"other_leakage_pj", [](const RunResult& r) { return Value{r.energy.other_leakage_pj}; }},
        {"energy_pj", [](const RunResult& r) { return Value{r.energy.total_pj}; }},
        {"utilization", [](const RunResult& r) { return Value{r.utilization}; }},
        {"mac_ops", [](const RunResult& r) { return Value{r.counters.mac_ops}; }},
        {"pe_active_cycles", [](const RunResult& r) { return Value{r.counters.pe_active_cycles}; }},
        {"w_mem_reads", [](const RunResult& r) { return Value{r.counters.w_mem_reads}; }},
        {"w_mem_writes", [](const RunResult& r) { return Value{r.counters.w_mem_writes}; }},
        {"fm_mem_reads", [](const RunResult& r) { return Value{r.counters.fm_mem_reads}; }},
        {"fm_mem_writes", [](const RunResult& r) { return Value{r.counters.fm_mem_writes}; }},
        {"psum_reads", [](const RunResult& r) { return Value{r.counters.psum_reads}; }},
        {"psum_writes", [](const RunResult& r) { return Value{r.counters.psum_writes}; }},
        {"rlc_bytes_in", [](const RunResult& r) { return Value{r.counters.rlc_bytes_in}; }},
        {"passes", [](const RunResult& r) { return Value{static_cast<std::uint64_t>(r.passes)}; }},
        {"golden_match", [](const RunResult& r) { return Value{r.golden_match}; }},
    };
    return fields;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_cell(const Value& v) {
    if (const auto* s = std::get_if<std::string>(&v)) {
        if (s->find_first_of(",\"\n") == std::string::npos) {
            return *s;
        }
        std::string q = "\"";
        for (char ch : *s) {
            q += ch;
            if (ch == '"') {
                q += '"';
            }
        }
        return q + "\"";
    }
    if (const auto* u = std::get_if<std::uint64_t>(&v)) {
        return std::to_string(*u);
    }
    if (const auto* d = std::get_if<double>(&v)) {
        return format_double(*d);
    }
    return std::get<bool>(v) ? "true" : "false";
}

nlohmann::ordered_json json_value(const Value& v) {
    return std::visit([](const auto& x) { return nlohmann::ordered_json(x); }, v);
}

nlohmann::ordered_json counters_json(const EngineCounters& c) {
    return {{"total_cycles", c.total_cycles}, {"pe_active_cycles", c.pe_active_cycles},
            {"rolls", c.rolls},               {"mac_ops", c.mac_ops},
            {"w_mem_reads", c.w_mem_reads},   {"w_mem_writes", c.w_mem_writes},
            {"fm_mem_reads", c.fm_mem_reads}, {"fm_mem_writes", c.fm_mem_writes},
            {"psum_reads", c.psum_reads},     {"psum_writes", c.psum_writes},
            {"rlc_bytes_in", c.rlc_bytes_in}};
}

nlohmann::ordered_json mac_json(const ppa::MacPpa& m) {
    return {{"name", m.name}, {"area_um2", m.area_um2}, {"power_uw", m.power_uw},
            {"delay_ns", m.delay_ns}, {"pdp_pj", m.pdp_pj}};
}

} // namespace

std::string to_csv(std::span<const RunResult> results) {
    std::string out;
    const auto& fields = summary_fields();
    for (std::size_t i = 0; i < fields.size(); ++i) {
        out += i ? "," : "";
        out += fields[i].name;
    }
    out += '\n';
    for (const RunResult& r : results) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            out += i ? "," : "";
            out += csv_cell(fields[i].get(r));
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const RunSpec& spec, std::span<const RunResult> results) {
    using nlohmann::ordered_json;
    ordered_json root;
    root["format_version"] = 1;

    ordered_json cfg;
    cfg["array"] = {{"rows", spec.shape.rows}, {"cols", spec.shape.cols}};
    cfg["memory"] = {{"w_row_words", spec.geom.w_row_words},
                     {"w_rows", spec.geom.w_rows},
                     {"fm_row_words", spec.geom.fm_row_words},
                     {"fm_rows", spec.geom.fm_rows}};
    cfg["batches"] = spec.batches;
    cfg["seed"] = spec.seed;
    cfg["mac_backend"] = std::string(to_string(spec.backend));
    cfg["quant_shift"] = spec.quant.shift;
    cfg["ppa"] = {{"source", spec.ppa_source},
                  {"tcd_mac", mac_json(spec.ppa.tcd_mac)},
                  {"conv_mac", mac_json(spec.ppa.conv_mac)},
                  {"clock_mhz", spec.ppa.clock_mhz},
                  {"pe_leak_mw", spec.ppa.pe_leak_mw},
                  {"mem_leak_mw", spec.ppa.mem_leak_mw},
                  {"other_leak_mw", spec.ppa.other_leak_mw},
                  {"mem_read_energy_pj", spec.ppa.mem_read_energy_pj},
                  {"mem_write_energy_pj", spec.ppa.mem_write_energy_pj},
                  {"nlr_writeback_cycles", spec.ppa.nlr_writeback_cycles}};
    root["config"] = std::move(cfg);

    ordered_json runs = ordered_json::array();
    for (const RunResult& r : results) {
        ordered_json run;
        for (const Field& f : summary_fields()) {
            run[f.name] = json_value(f.get(r));
        }
        ordered_json layers = ordered_json::array();
        for (const LayerRow& l : r.layers) {
            ordered_json events = ordered_json::array();
            for (const mapper::ScheduleEvent& e : l.events) {
                events.push_back({{"config", {e.config.batches, e.config.neurons}},
                                  {"load", {e.load.batches, e.load.neurons}},
                                  {"rolls", e.rolls},
                                  {"cycles_per_roll", e.cycles_per_roll},
                                  {"batch_begin", e.batch_begin},
                                  {"neuron_begin", e.neuron_begin},
                                  {"batch_groups", e.batch_groups},
                                  {"neuron_groups", e.neuron_groups}});
            }
            layers.push_back({{"pass", l.pass},
                              {"layer", l.layer},
                              {"batches", l.batches},
                              {"inputs", l.inputs},
                              {"neurons", l.neurons},
                              {"utilization", l.utilization},
                              {"counters", counters_json(l.counters)},
                              {"events", std::move(events)}});
        }
        run["layers"] = std::move(layers);
        runs.push_back(std::move(run));
    }
    root["runs"] = std::move(runs);
    return root.dump(2) + "\n";
}

std::vector<std::string> write_reports(const RunSpec& spec, std::span<const RunResult> results,
                                       const std::string& dir, ReportFormat format) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create output directory '" + dir + "': " + ec.message());
    }
    std::vector<std::string> written;
    auto emit = [&](const char* name, const std::string& body) {
        const std::string path = (fs::path(dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        out << body;
        if (!out) {
            throw Error("cannot write '" + path + "'");
        }
        written.push_back(path);
    };
    if (format != ReportFormat::Csv) {
        emit("report.json", to_json(spec, results));
    }
    if (format != ReportFormat::Json) {
        emit("report.csv", to_csv(results));
    }
    return written;
}

} // namespace tcdnpe::cli
