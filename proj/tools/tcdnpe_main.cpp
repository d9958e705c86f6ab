// tcdnpe: schedule, simulate and cost MLP benchmarks on a TCD-NPE.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "tcdnpe/cli/run.hpp"
#include "tcdnpe/error.hpp"
#include "tcdnpe/simd/kernels.hpp"

int main(int argc, char** argv) {
    using namespace tcdnpe;

    CLI::App app{"Cycle-level TCD-NPE simulator and benchmark harness"};
    std::string model = "suite";
    int batch = 1;
    int rows = 16;
    int cols = 8;
    std::string dataflow = "all";
    std::string ppa_file;
    std::vector<std::string> ppa_set;
    std::string out_dir = "tcdnpe_out";
    std::string format = "both";
    std::uint64_t seed = 1;
    std::string backend = "gate";
    std::string weights;
    std::string inputs;
    npesim::MemGeometry geom;
    bool selftest = false;

    app.add_option("--model", model, "Benchmark name, 'suite', or topology such as 784:700:10")
        ->capture_default_str();
    app.add_option("--batch", batch, "Input batches B")->capture_default_str();
    app.add_option("--rows", rows, "PE-array rows (thread groups)")->capture_default_str();
    app.add_option("--cols", cols, "PE-array columns (PEs per thread group)")->capture_default_str();
    app.add_option("--dataflow", dataflow, "os-tcd, os-conv, nlr, rna, all, or a comma list")
        ->capture_default_str();
    app.add_option("--ppa", ppa_file, "PPA parameter file (default: $TCDNPE_PPA, else built-in)");
    app.add_option("--ppa-set", ppa_set, "Override one PPA key, e.g. clock_mhz=600 (repeatable)");
    app.add_option("--out", out_dir, "Report directory")->capture_default_str();
    app.add_option("--format", format, "json, csv or both")->capture_default_str();
    app.add_option("--seed", seed, "Seed for random weights and inputs")->capture_default_str();
    app.add_option("--mac-backend", backend, "gate (bit-level CEL) or packed (SIMD carry-save)")
        ->capture_default_str();
    app.add_option("--weights", weights, "Weight file (TCDW records) for a single model");
    app.add_option("--inputs", inputs, "Feature file (TCDF record) for a single model");
    app.add_option("--w-row-words", geom.w_row_words, "W-Mem words per row")->capture_default_str();
    app.add_option("--w-rows", geom.w_rows, "W-Mem rows")->capture_default_str();
    app.add_option("--fm-row-words", geom.fm_row_words, "FM-Mem words per row")->capture_default_str();
    app.add_option("--fm-rows", geom.fm_rows, "FM-Mem rows per bank")->capture_default_str();
    app.add_flag("--selftest", selftest, "Run the bit-exact equivalence checks and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (selftest) {
            return cli::run_selftest(std::cout) ? EXIT_SUCCESS : EXIT_FAILURE;
        }

        cli::RunSpec spec;
        spec.benchmarks = cli::resolve_models(model);
        spec.batches = batch;
        spec.shape = {rows, cols};
        spec.geom = geom;
        spec.dataflows = cli::parse_dataflows(dataflow);
        spec.seed = seed;
        spec.backend = cli::parse_backend(backend);
        spec.weights_file = weights;
        spec.inputs_file = inputs;
        const cli::ReportFormat fmt = cli::parse_format(format);

        if (ppa_file.empty()) {
            if (const char* env = std::getenv("TCDNPE_PPA"); env != nullptr && *env != '\0') {
                ppa_file = env;
            }
        }
        if (!ppa_file.empty()) {
            spec.ppa = ppa::load_ppa_file(ppa_file);
            spec.ppa_source = ppa_file;
        }
        for (const std::string& kv : ppa_set) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("--ppa-set expects key=value, got '" + kv + "'");
            }
            ppa::apply_ppa_setting(spec.ppa, kv.substr(0, eq), kv.substr(eq + 1));
        }

        const auto results = cli::run_benchmarks(spec);
        for (const std::string& path : cli::write_reports(spec, results, out_dir, fmt)) {
            std::cout << "wrote " << path << '\n';
        }
        for (const cli::RunResult& r : results) {
            if (!r.golden_match) {
                std::cerr << "error: " << r.benchmark << " / " << to_string(r.dataflow)
                          << " differs from the fixed-point reference\n";
                return 3;
            }
        }
        return EXIT_SUCCESS;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
