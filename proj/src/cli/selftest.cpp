#include <algorithm>
#include <ostream>
#include <random>

#include "tcdnpe/bitmac/tcd_mac.hpp"
#include "tcdnpe/cli/run.hpp"
#include "tcdnpe/goldref/goldref.hpp"
#include "tcdnpe/simd/kernels.hpp"

namespace tcdnpe::cli {
namespace {

std::vector<OperandPair> random_stream(std::mt19937_64& rng, std::size_t len) {
    std::uniform_int_distribution<int> word(-32768, 32767);
    std::vector<OperandPair> s(len);
    for (OperandPair& p : s) {
        p = {static_cast<std::int16_t>(word(rng)), static_cast<std::int16_t>(word(rng))};
    }
    return s;
}

bool tcd_mac_streams() {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> len(1, 256);
    for (int t = 0; t < 200; ++t) {
        const auto s = random_stream(rng, len(rng));
        const auto r = bitmac::tcd_mac_stream(s);
        if (r.value != goldref::exact_dot(s) || r.cycles != s.size() + 1) {
            return false;
        }
    }
    return true;
}

bool simd_kernels() {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> word(-32768, 32767);
    std::vector<std::int16_t> a(301);
    std::vector<std::int16_t> b(301);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = static_cast<std::int16_t>(word(rng));
        b[i] = static_cast<std::int16_t>(word(rng));
    }
    if (simd::dot_i16(a, b) != simd::scalar::dot_i16(a, b)) {
        return false;
    }
    std::vector<std::uint64_t> s1(a.size(), 0), c1(a.size(), 0), s2(a.size(), 0), c2(a.size(), 0);
    const std::uint64_t mask = acc_mask(kAccBits);
    for (int step = 0; step < 8; ++step) {
        simd::csa_accumulate(s1, c1, a, b, mask);
        simd::scalar::csa_accumulate(s2, c2, a, b, mask);
        std::rotate(a.begin(), a.begin() + 1, a.end());
    }
    return s1 == s2 && c1 == c2;
}

bool engine_matches_golden(npesim::MacBackend backend) {
    const std::vector<std::vector<int>> topologies = {{4, 10, 5, 3}, {13, 10, 3}, {70, 33, 9}};
    for (std::size_t t = 0; t < topologies.size(); ++t) {
        const auto model = goldref::random_model(topologies[t], 100 + t);
        const auto inputs = goldref::random_features(3, static_cast<std::size_t>(topologies[t][0]), 200 + t);
        const auto golden = goldref::mlp_forward(model, inputs);
        for (Dataflow d : kAllDataflows) {
            npesim::SimConfig cfg;
            cfg.dataflow = d;
            cfg.backend = backend;
            if (npesim::run_model(model, inputs, cfg).layer_outputs != golden) {
                return false;
            }
        }
    }
    return true;
}

} // namespace

bool run_selftest(std::ostream& log) {
    struct Check {
        const char* name;
        bool (*run)();
    };
    const Check checks[] = {
        {"tcd-mac-vs-exact-dot", tcd_mac_streams},
        {"simd-vs-scalar-kernels", simd_kernels},
        {"engine-gate-vs-golden", [] { return engine_matches_golden(npesim::MacBackend::Gate); }},
        {"engine-packed-vs-golden", [] { return engine_matches_golden(npesim::MacBackend::Packed); }},
    };
    bool ok = true;
    for (const Check& c : checks) {
        const bool pass = c.run();
        log << (pass ? "PASS " : "FAIL ") << c.name << '\n';
        ok = ok && pass;
    }
    log << "simd isa: " << simd::isa_name(simd::active_isa()) << '\n';
    return ok;
}

} // namespace tcdnpe::cli
