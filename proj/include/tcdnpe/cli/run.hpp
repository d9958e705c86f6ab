#pragma once

#include <cstdint>
#include <iosfwd>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tcdnpe/dataflow.hpp"
#include "tcdnpe/fixed.hpp"
#include "tcdnpe/mapper/mapper.hpp"
#include "tcdnpe/npesim/engine.hpp"
#include "tcdnpe/npesim/memory.hpp"
#include "tcdnpe/ppamodel/ppa.hpp"

namespace tcdnpe::cli {

struct Benchmark {
    std::string name;
    std::vector<int> topology;
};

// The seven evaluation topologies.
std::span<const Benchmark> benchmark_suite();

// "784:700:10" -> {784, 700, 10}. Throws ConfigError naming the offending token.
std::vector<int> parse_topology(std::string_view text);
std::string format_topology(std::span<const int> sizes);

// "all", or a comma-separated list of dataflow names.
std::vector<Dataflow> parse_dataflows(std::string_view text);

// "suite" / "all", a benchmark name, or a topology string.
std::vector<Benchmark> resolve_models(std::string_view text);

npesim::MacBackend parse_backend(std::string_view text);
std::string_view to_string(npesim::MacBackend backend);

enum class ReportFormat { Json, Csv, Both };
ReportFormat parse_format(std::string_view text);

struct RunSpec {
    std::vector<Benchmark> benchmarks;
    int batches = 1;
    mapper::ArrayShape shape;
    npesim::MemGeometry geom;
    std::vector<Dataflow> dataflows{std::begin(kAllDataflows), std::end(kAllDataflows)};
    ppa::EnginePpa ppa = ppa::default_engine_ppa();
    std::string ppa_source = "builtin";
    std::uint64_t seed = 1;
    npesim::MacBackend backend = npesim::MacBackend::Gate;
    QuantConfig quant;
    // Optional weight / feature files; they replace the seeded random data of
    // a single benchmark.
    std::string weights_file;
    std::string inputs_file;

    // Throws ConfigError for B < 1, an empty benchmark or dataflow list, or a
    // file given alongside several benchmarks.
    void validate() const;
};

struct LayerRow {
    int pass = 0;
    int layer = 0;
    int batches = 0;
    int inputs = 0;
    int neurons = 0;
    EngineCounters counters;
    double utilization = 0;
    std::vector<mapper::ScheduleEvent> events;
};

struct RunResult {
    std::string benchmark;
    std::string topology;
    int batches = 0;
    Dataflow dataflow = Dataflow::OsTcd;
    EngineCounters counters;
    ppa::EnergyReport energy;
    // Useful PE-cycles over offered PE-cycles.
    double utilization = 0;
    int passes = 0;
    bool golden_match = false;
    std::vector<LayerRow> layers;
};

// Every (benchmark x dataflow) in input order. Throws on capacity or file errors.
std::vector<RunResult> run_benchmarks(const RunSpec& spec);

// One header line plus one row per run.
std::string to_csv(std::span<const RunResult> results);
// Full report: configuration, per-run summary (the CSV fields) and per-layer detail.
std::string to_json(const RunSpec& spec, std::span<const RunResult> results);

// Writes report.json and/or report.csv into `dir` (created if missing).
// Returns the written paths.
std::vector<std::string> write_reports(const RunSpec& spec, std::span<const RunResult> results,
                                       const std::string& dir, ReportFormat format);

// Bit-exact equivalence checks; one "PASS name" / "FAIL name" line each.
bool run_selftest(std::ostream& log);

} // namespace tcdnpe::cli
