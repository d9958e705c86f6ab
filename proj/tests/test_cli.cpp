#include <doctest.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcdnpe/cli/run.hpp"
#include "tcdnpe/error.hpp"
#include "tcdnpe/goldref/goldref.hpp"

using namespace tcdnpe;
using namespace tcdnpe::cli;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        out.push_back(item);
    }
    return out;
}

RunSpec tiny_spec() {
    RunSpec spec;
    spec.benchmarks = resolve_models("iris");
    spec.batches = 2;
    spec.seed = 3;
    return spec;
}

} // namespace

TEST_SUITE("topology") {
    TEST_CASE("valid strings") {
        CHECK(parse_topology("14:48:2") == std::vector<int>{14, 48, 2});
        CHECK(parse_topology("8:140:2") == std::vector<int>{8, 140, 2});
        CHECK(parse_topology(" 4 : 10 :5:3") == std::vector<int>{4, 10, 5, 3});
        CHECK(format_topology(std::vector<int>{784, 700, 10}) == "784:700:10");
    }

    TEST_CASE("errors name the offending token") {
        for (const char* bad : {"x:3", "4::3", "0:3", "3:-1", "5", "", "3:4x"}) {
            CAPTURE(bad);
            CHECK_THROWS_AS(parse_topology(bad), ConfigError);
        }
        try {
            parse_topology("12:x7:3");
            FAIL("expected an error");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("'x7'") != std::string::npos);
        }
    }
}

TEST_SUITE("options") {
    TEST_CASE("suite and model names") {
        const auto suite = benchmark_suite();
        REQUIRE(suite.size() == 7);
        CHECK(suite[0].topology == std::vector<int>{784, 700, 10});
        CHECK(suite[6].topology == std::vector<int>{728, 256, 128, 100, 10});
        CHECK(resolve_models("suite").size() == 7);
        CHECK(resolve_models("poker")[0].topology == std::vector<int>{10, 85, 50, 10});
        CHECK(resolve_models("3:2")[0].name == "3:2");
        CHECK_THROWS_AS(resolve_models("cifar"), ConfigError);
    }

    TEST_CASE("dataflow lists") {
        CHECK(parse_dataflows("all").size() == 4);
        CHECK(parse_dataflows("nlr,os-tcd,nlr") == std::vector<Dataflow>{Dataflow::Nlr, Dataflow::OsTcd});
        CHECK_THROWS_AS(parse_dataflows("os-tcd,ws"), ConfigError);
        CHECK(parse_format("csv") == ReportFormat::Csv);
        CHECK_THROWS_AS(parse_format("xml"), ConfigError);
        CHECK(parse_backend("packed") == npesim::MacBackend::Packed);
        CHECK_THROWS_AS(parse_backend("fast"), ConfigError);
    }

    TEST_CASE("run validation") {
        RunSpec spec = tiny_spec();
        spec.batches = 0;
        CHECK_THROWS_AS(run_benchmarks(spec), ConfigError);
        spec = tiny_spec();
        spec.dataflows.clear();
        CHECK_THROWS_AS(run_benchmarks(spec), ConfigError);
        spec = tiny_spec();
        spec.benchmarks = resolve_models("suite");
        spec.weights_file = "w.bin";
        CHECK_THROWS_AS(run_benchmarks(spec), ConfigError);
    }
}

TEST_SUITE("reports") {
    TEST_CASE("one run per benchmark and dataflow, all exact") {
        const auto results = run_benchmarks(tiny_spec());
        REQUIRE(results.size() == 4);
        for (const auto& r : results) {
            CHECK(r.golden_match);
            CHECK(r.benchmark == "iris");
            CHECK(r.layers.size() == 3);
        }
    }

    TEST_CASE("4:10:5:3 with one batch: rolls match the exhaustive oracle") {
        RunSpec spec;
        spec.benchmarks = resolve_models("4:10:5:3");
        spec.dataflows = {Dataflow::OsTcd};
        const auto results = run_benchmarks(spec);
        int oracle = 0;
        for (int u : {10, 5, 3}) {
            oracle += mapper::brute_force_min_rolls(1, u, spec.shape);
        }
        CHECK(results.at(0).counters.rolls == static_cast<std::uint64_t>(oracle));
    }

    TEST_CASE("same seed gives byte-identical reports") {
        const RunSpec spec = tiny_spec();
        const auto a = run_benchmarks(spec);
        const auto b = run_benchmarks(spec);
        CHECK(to_csv(a) == to_csv(b));
        CHECK(to_json(spec, a) == to_json(spec, b));
    }

    TEST_CASE("CSV and JSON agree field for field") {
        const RunSpec spec = tiny_spec();
        const auto results = run_benchmarks(spec);
        const auto lines = split(to_csv(results), '\n');
        REQUIRE(lines.size() == results.size() + 1);
        const auto header = split(lines[0], ',');
        const auto json = nlohmann::json::parse(to_json(spec, results));
        REQUIRE(json["runs"].size() == results.size());
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto cells = split(lines[i + 1], ',');
            REQUIRE(cells.size() == header.size());
            const auto& run = json["runs"][i];
            for (std::size_t f = 0; f < header.size(); ++f) {
                CAPTURE(header[f]);
                const auto& v = run.at(header[f]);
                if (v.is_string()) {
                    CHECK(v.get<std::string>() == cells[f]);
                } else if (v.is_boolean()) {
                    CHECK((v.get<bool>() ? "true" : "false") == cells[f]);
                } else if (v.is_number_unsigned()) {
                    CHECK(std::to_string(v.get<std::uint64_t>()) == cells[f]);
                } else {
                    double parsed = 0;
                    std::from_chars(cells[f].data(), cells[f].data() + cells[f].size(), parsed);
                    CHECK(v.get<double>() == parsed);
                }
            }
        }
    }

    TEST_CASE("files are written to the output directory") {
        const auto dir = std::filesystem::temp_directory_path() / "tcdnpe_cli_test";
        std::filesystem::remove_all(dir);
        const RunSpec spec = tiny_spec();
        const auto results = run_benchmarks(spec);
        const auto paths = write_reports(spec, results, dir.string(), ReportFormat::Both);
        CHECK(paths.size() == 2);
        for (const auto& p : paths) {
            CHECK(std::filesystem::file_size(p) > 0);
        }
        CHECK(write_reports(spec, results, dir.string(), ReportFormat::Csv).size() == 1);
        std::filesystem::remove_all(dir);
    }

    TEST_CASE("weight and input files replace the random data") {
        const auto dir = std::filesystem::temp_directory_path() / "tcdnpe_cli_files";
        std::filesystem::create_directories(dir);
        const std::vector<int> sizes{6, 4, 2};
        const auto model = goldref::random_model(sizes, 77);
        const Matrix16 in = goldref::random_features(3, 6, 78);
        {
            std::ofstream w(dir / "w.bin", std::ios::binary);
            goldref::write_model(w, model);
            std::ofstream f(dir / "x.bin", std::ios::binary);
            goldref::write_features(f, in);
        }
        RunSpec spec;
        spec.benchmarks = resolve_models("6:4:2");
        spec.dataflows = {Dataflow::OsTcd};
        spec.weights_file = (dir / "w.bin").string();
        spec.inputs_file = (dir / "x.bin").string();
        const auto results = run_benchmarks(spec);
        CHECK(results.at(0).batches == 3);
        CHECK(results.at(0).golden_match);
        spec.benchmarks = resolve_models("6:5:2");
        CHECK_THROWS_AS(run_benchmarks(spec), ConfigError);
        std::filesystem::remove_all(dir);
    }

    TEST_CASE("selftest passes") {
        std::ostringstream log;
        CHECK(run_selftest(log));
        CHECK(log.str().find("FAIL") == std::string::npos);
    }
}
