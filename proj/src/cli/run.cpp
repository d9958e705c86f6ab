#include "tcdnpe/cli/run.hpp"

#include <algorithm>
#include <charconv>

#include "tcdnpe/error.hpp"
#include "tcdnpe/goldref/goldref.hpp"

namespace tcdnpe::cli {
namespace {

const Benchmark kSuite[] = {
    {"mnist", {784, 700, 10}},
    {"adult", {14, 48, 2}},
    {"fft", {8, 140, 2}},
    {"wine", {13, 10, 3}},
    {"iris", {4, 10, 5, 3}},
    {"poker", {10, 85, 50, 10}},
    {"fashion_mnist", {728, 256, 128, 100, 10}},
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        out.push_back(trim(text.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

} // namespace

std::span<const Benchmark> benchmark_suite() { return kSuite; }

std::vector<int> parse_topology(std::string_view text) {
    std::vector<int> sizes;
    for (std::string_view tok : split(text, ':')) {
        int v = 0;
        const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc{} || end != tok.data() + tok.size() || v < 1) {
            throw ConfigError("bad topology token '" + std::string(tok) + "' in '" + std::string(text) +
                              "': expected a positive integer");
        }
        sizes.push_back(v);
    }
    if (sizes.size() < 2) {
        throw ConfigError("topology '" + std::string(text) + "' needs at least two layers");
    }
    return sizes;
}

std::string format_topology(std::span<const int> sizes) {
    std::string out;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i > 0) {
            out += ':';
        }
        out += std::to_string(sizes[i]);
    }
    return out;
}

std::vector<Dataflow> parse_dataflows(std::string_view text) {
    if (trim(text) == "all") {
        return {std::begin(kAllDataflows), std::end(kAllDataflows)};
    }
    std::vector<Dataflow> out;
    for (std::string_view tok : split(text, ',')) {
        const auto d = parse_dataflow(tok);
        if (!d) {
            throw ConfigError("unknown dataflow '" + std::string(tok) + "' (os-tcd, os-conv, nlr, rna, all)");
        }
        if (std::find(out.begin(), out.end(), *d) == out.end()) {
            out.push_back(*d);
        }
    }
    return out;
}

std::vector<Benchmark> resolve_models(std::string_view text) {
    text = trim(text);
    if (text == "suite" || text == "all") {
        return {std::begin(kSuite), std::end(kSuite)};
    }
    for (const Benchmark& b : kSuite) {
        if (b.name == text) {
            return {b};
        }
    }
    if (text.find(':') == std::string_view::npos) {
        throw ConfigError("unknown model '" + std::string(text) + "': use a benchmark name, 'suite' or a topology");
    }
    const std::vector<int> sizes = parse_topology(text);
    return {Benchmark{format_topology(sizes), sizes}};
}

npesim::MacBackend parse_backend(std::string_view text) {
    if (text == "gate") {
        return npesim::MacBackend::Gate;
    }
    if (text == "packed") {
        return npesim::MacBackend::Packed;
    }
    throw ConfigError("unknown MAC backend '" + std::string(text) + "' (gate, packed)");
}

std::string_view to_string(npesim::MacBackend backend) {
    return backend == npesim::MacBackend::Gate ? "gate" : "packed";
}

ReportFormat parse_format(std::string_view text) {
    if (text == "json") {
        return ReportFormat::Json;
    }
    if (text == "csv") {
        return ReportFormat::Csv;
    }
    if (text == "both") {
        return ReportFormat::Both;
    }
    throw ConfigError("unknown format '" + std::string(text) + "' (json, csv, both)");
}

void RunSpec::validate() const {
    if (batches < 1) {
        throw ConfigError("batch must be at least 1, got " + std::to_string(batches));
    }
    if (benchmarks.empty()) {
        throw ConfigError("no model selected");
    }
    if (dataflows.empty()) {
        throw ConfigError("no dataflow selected");
    }
    if ((!weights_file.empty() || !inputs_file.empty()) && benchmarks.size() != 1) {
        throw ConfigError("weight and input files apply to a single model");
    }
    geom.validate();
    mapper::enumerate_configs(shape);
}

std::vector<RunResult> run_benchmarks(const RunSpec& spec) {
    spec.validate();
    std::vector<RunResult> results;
    for (const Benchmark& bench : spec.benchmarks) {
        goldref::MlpModel model = spec.weights_file.empty() ? goldref::random_model(bench.topology, spec.seed)
                                                            : goldref::load_model_file(spec.weights_file);
        if (!spec.weights_file.empty() && model.layer_sizes != bench.topology) {
            throw ConfigError("weight file topology " + format_topology(model.layer_sizes) +
                              " does not match model " + format_topology(bench.topology));
        }
        Matrix16 inputs = spec.inputs_file.empty()
                              ? goldref::random_features(static_cast<std::size_t>(spec.batches),
                                                         static_cast<std::size_t>(bench.topology.front()),
                                                         spec.seed + 1)
                              : goldref::load_features_file(spec.inputs_file);
        if (inputs.cols != static_cast<std::size_t>(bench.topology.front())) {
            throw ConfigError("input file has " + std::to_string(inputs.cols) + " features, model expects " +
                              std::to_string(bench.topology.front()));
        }
        const std::vector<Matrix16> golden = goldref::mlp_forward(model, inputs, spec.quant);

        for (Dataflow d : spec.dataflows) {
            npesim::SimConfig cfg;
            cfg.shape = spec.shape;
            cfg.geom = spec.geom;
            cfg.dataflow = d;
            cfg.backend = spec.backend;
            cfg.quant = spec.quant;
            const npesim::ModelRun run = npesim::run_model(model, inputs, cfg);

            RunResult r;
            r.benchmark = bench.name;
            r.topology = format_topology(bench.topology);
            r.batches = static_cast<int>(inputs.rows);
            r.dataflow = d;
            r.counters = run.totals;
            r.energy = ppa::energy_report(run.totals, spec.ppa, d);
            const double offered = static_cast<double>(run.totals.total_cycles) * spec.shape.total();
            r.utilization = offered > 0 ? static_cast<double>(run.totals.pe_active_cycles) / offered : 0;
            r.passes = run.passes;
            r.golden_match = run.layer_outputs == golden;
            for (const npesim::LayerReport& lr : run.layers) {
                r.layers.push_back({lr.pass, lr.layer, lr.problem.batches, lr.problem.inputs, lr.problem.neurons,
                                    lr.counters, lr.utilization, lr.events});
            }
            results.push_back(std::move(r));
        }
    }
    return results;
}

} // namespace tcdnpe::cli
