#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <vector>

#include "tcdnpe/error.hpp"
#include "tcdnpe/goldref/goldref.hpp"
#include "tcdnpe/npesim/cast.hpp"
#include "tcdnpe/npesim/engine.hpp"
#include "tcdnpe/npesim/memory.hpp"
#include "tcdnpe/npesim/rlc.hpp"
#include "tcdnpe/ppamodel/ppa.hpp"

using namespace tcdnpe;
using namespace tcdnpe::npesim;

namespace {

std::vector<std::uint8_t> bytes(std::initializer_list<int> v) {
    std::vector<std::uint8_t> out;
    for (int x : v) {
        out.push_back(static_cast<std::uint8_t>(x));
    }
    return out;
}

// Gamma(2, 200, 100) on NPE(2, 64): the memory walk-through configuration.
struct Walkthrough {
    goldref::MlpModel model = goldref::random_model(std::vector<int>{200, 100}, 31);
    Matrix16 inputs = goldref::random_features(2, 200, 32);
    SimConfig cfg;
    std::vector<mapper::ScheduleEvent> events;

    Walkthrough() {
        cfg.allowed = {{2, 64}};
        mapper::ScheduleOptions opts;
        opts.allowed = cfg.allowed;
        events = mapper::schedule_layer({2, 200, 100}, cfg.shape, 1, opts);
    }
};

} // namespace

TEST_SUITE("memory") {
    TEST_CASE("counted row and word access") {
        MemImage m(4, 3);
        const std::vector<std::int16_t> row{1, -2, 3};
        m.write_row(2, row);
        m.write_word(0, 1, 7);
        CHECK(m.read_row(2)[1] == -2);
        CHECK(m.peek(0, 1) == 7);
        CHECK(m.read_count() == 1);
        CHECK(m.write_count() == 1);
        CHECK(m.word_write_count() == 1);
        CHECK_THROWS_AS(m.read_row(4), ConfigError);
        CHECK_THROWS_AS(m.write_word(0, 3, 1), ConfigError);
        CHECK_THROWS_AS(m.write_row(0, std::vector<std::int16_t>(4)), ConfigError);
        std::ostringstream hex;
        m.dump_hex(hex, 3);
        CHECK(hex.str() == "0000 0007 0000\n0000 0000 0000\n0001 fffe 0003\n");
    }

    TEST_CASE("weight block of the walk-through spans 100 rows") {
        const MemGeometry g;
        CHECK(weight_block_rows(200, 64, g) == 100);
        CHECK(weight_block_rows(200, 128, g) == 200);
        CHECK(weight_block_rows(200, 100, g) == 200); // 100-word slots leave 28 words idle
        CHECK(weight_block_rows(5, 8, g) == 1);
    }

    TEST_CASE("feature segment of the walk-through spans 7 rows, 32 words wide") {
        const FeatureLayout f = plan_features(2, 200, MemGeometry{});
        CHECK(f.segment_words == 32);
        CHECK(f.row_count == 7);
        CHECK(f.row_of(199) == 6);
        CHECK(f.word_of(1, 33) == 33);
    }

    TEST_CASE("weight and feature layouts invert") {
        const Matrix16 w = goldref::random_model(std::vector<int>{37, 21}, 3, -32768, 32767).weights[0];
        for (int slot : {8, 16, 32, 64, 128}) {
            const WeightLayout lay = layout_weights(w, slot, MemGeometry{});
            CHECK(read_back_weights(lay, 37, 21) == w);
            CHECK(lay.blocks.size() == static_cast<std::size_t>((21 + slot - 1) / slot));
        }
        const Matrix16 f = goldref::random_features(5, 77, 4, -32768, 32767);
        const FeatureImage img = layout_features(f, MemGeometry{});
        CHECK(read_back_features(img.image, img.layout) == f);
    }

    TEST_CASE("capacity errors") {
        MemGeometry small;
        small.w_rows = 10;
        small.fm_rows = 3;
        const Matrix16 w(100, 10);
        CHECK_THROWS_AS(layout_weights(w, 64, small), CapacityError);
        CHECK_THROWS_AS(plan_features(65, 10, MemGeometry{}), CapacityError);
        CHECK_THROWS_AS(plan_features(2, 97, small), CapacityError); // 4 rows of 32
        CHECK_NOTHROW(plan_features(2, 96, small));
        const MemGeometry zero_rows{128, 64, 0, 512};
        CHECK_THROWS_AS(zero_rows.validate(), ConfigError);
    }
}

TEST_SUITE("cast") {
    TEST_CASE("NPE(2,64) on 16x8") {
        const CastPattern p = make_cast_pattern({2, 64}, {16, 8});
        CHECK(p.tg_batch_slot[7] == 0);
        CHECK(p.tg_batch_slot[8] == 1);
        CHECK(p.feature_fanout(0) == 8);
        CHECK(p.feature_fanout(1) == 8);
        for (int n = 0; n < 64; ++n) {
            REQUIRE(p.weight_fanout(n) == 2);
        }
        CHECK(p.pe_neuron_slot[9 * 8 + 3] == 11);
        CHECK(p.batch_slot_of_pe(9 * 8 + 3) == 1);
    }

    TEST_CASE("illegal configuration") {
        CHECK_THROWS_AS(make_cast_pattern({3, 40}, {16, 8}), ConfigError);
    }
}

TEST_SUITE("rlc") {
    TEST_CASE("hand-encoded runs") {
        CHECK(rlc_encode(bytes({5, 5, 5, 7})) == bytes({5, 3, 7, 1}));
        CHECK(rlc_encode(std::vector<std::uint8_t>(300, 0)) == bytes({0, 255, 0, 45}));
        CHECK(rlc_encode({}).empty());
        CHECK(rlc_decode(bytes({9, 2, 1, 1})) == bytes({9, 9, 1}));
    }

    TEST_CASE("malformed streams") {
        CHECK_THROWS_AS(rlc_decode(bytes({1, 2, 3})), FormatError);
        CHECK_THROWS_AS(rlc_decode(bytes({1, 0})), FormatError);
    }

    TEST_CASE("little-endian word bytes") {
        const std::vector<std::int16_t> w{0x0102, -1};
        CHECK(word_bytes(w) == bytes({0x02, 0x01, 0xff, 0xff}));
    }
}

TEST_SUITE("engine") {
    TEST_CASE("walk-through layer: access counts") {
        Walkthrough wt;
        REQUIRE(mapper::total_rolls(wt.events) == 2);
        NpeSimulator sim(wt.cfg);
        sim.load_inputs(wt.inputs);
        const LayerReport rep = sim.run_layer(wt.events, wt.model.weights[0]);
        const EngineCounters& c = rep.counters;
        CHECK(c.rolls == 2);
        CHECK(c.total_cycles == 2 * 201);
        CHECK(c.mac_ops == 2 * 100 * 200);
        CHECK(c.pe_active_cycles == (128 + 72) * 201);
        CHECK(c.w_mem_reads == 2 * 100);  // 200 cycles per roll, one row serves two
        CHECK(c.w_mem_writes == 2 * 100); // two 64-neuron blocks
        CHECK(c.fm_mem_reads == 2 * 7);
        CHECK(c.fm_mem_writes == 200);
        CHECK(rep.fm_cycles_per_read == 32);
        CHECK(sim.current_features() == goldref::mlp_forward(wt.model, wt.inputs)[0]);
    }

    TEST_CASE("ping-pong banks alternate and never read what they write") {
        const std::vector<int> sizes{30, 20, 10, 5};
        const auto model = goldref::random_model(sizes, 40);
        const Matrix16 in = goldref::random_features(3, 30, 41);
        NpeSimulator sim(SimConfig{});
        sim.load_inputs(in);
        for (std::size_t l = 0; l < model.weights.size(); ++l) {
            const int active = sim.active_bank();
            const auto reads_other = sim.fm_bank(1 - active).read_count();
            const auto words_active = sim.fm_bank(active).word_write_count();
            const auto events = mapper::schedule_layer({3, sizes[l], sizes[l + 1]}, SimConfig{}.shape,
                                                       static_cast<int>(l + 1));
            sim.run_layer(events, model.weights[l]);
            CHECK(sim.active_bank() == 1 - active);
            CHECK(sim.fm_bank(1 - active).word_write_count() > 0);
            CHECK(sim.fm_bank(1 - active).read_count() == reads_other);
            CHECK(sim.fm_bank(active).word_write_count() == words_active);
        }
    }

    TEST_CASE("outputs equal the reference for every dataflow and backend") {
        const std::vector<std::vector<int>> topologies{{13, 10, 3}, {4, 10, 5, 3}, {90, 40, 17}};
        for (const auto& sizes : topologies) {
            const auto model = goldref::random_model(sizes, 50);
            for (int b : {1, 3, 7}) {
                const Matrix16 in = goldref::random_features(static_cast<std::size_t>(b),
                                                             static_cast<std::size_t>(sizes[0]), 51);
                const auto golden = goldref::mlp_forward(model, in);
                for (Dataflow d : kAllDataflows) {
                    for (MacBackend be : {MacBackend::Gate, MacBackend::Packed}) {
                        SimConfig cfg;
                        cfg.dataflow = d;
                        cfg.backend = be;
                        REQUIRE(run_model(model, in, cfg).layer_outputs == golden);
                    }
                }
            }
        }
    }

    TEST_CASE("signed inputs and saturation also match") {
        const std::vector<int> sizes{64, 16};
        const auto model = goldref::random_model(sizes, 52, -32768, 32767);
        const Matrix16 in = goldref::random_features(2, 64, 53, -32768, 32767);
        CHECK(run_model(model, in, SimConfig{}).layer_outputs == goldref::mlp_forward(model, in));
    }

    TEST_CASE("zero weights give zero outputs") {
        const std::vector<int> sizes{20, 9};
        auto model = goldref::random_model(sizes, 1);
        std::fill(model.weights[0].data.begin(), model.weights[0].data.end(), 0);
        const auto run = run_model(model, goldref::random_features(2, 20, 2), SimConfig{});
        CHECK(std::all_of(run.outputs().data.begin(), run.outputs().data.end(), [](auto v) { return v == 0; }));
    }

    TEST_CASE("cycle laws per dataflow") {
        const std::vector<int> sizes{50, 70, 12};
        const auto model = goldref::random_model(sizes, 60);
        const Matrix16 in = goldref::random_features(3, 50, 61);
        std::uint64_t os_cycles[2] = {0, 0};
        std::uint64_t rolls = 0;
        for (Dataflow d : kAllDataflows) {
            SimConfig cfg;
            cfg.dataflow = d;
            const ModelRun run = run_model(model, in, cfg);
            for (const LayerReport& rep : run.layers) {
                const std::uint64_t i = static_cast<std::uint64_t>(rep.problem.inputs);
                std::uint64_t expect = 0;
                for (const auto& e : rep.events) {
                    expect += static_cast<std::uint64_t>(e.rolls) * (i + (d == Dataflow::OsTcd ? 1 : 0));
                }
                if (d == Dataflow::Rna) {
                    expect = ppa::rna_layer_cycles(3, rep.problem.inputs, rep.problem.neurons, 128);
                }
                CHECK(rep.counters.total_cycles == expect);
                if (d == Dataflow::Nlr) {
                    CHECK(rep.counters.psum_reads > 0);
                    CHECK(rep.counters.psum_writes == rep.counters.psum_reads);
                } else {
                    CHECK(rep.counters.psum_reads == 0);
                }
            }
            if (d == Dataflow::OsTcd || d == Dataflow::OsConv) {
                os_cycles[d == Dataflow::OsTcd ? 0 : 1] = run.totals.total_cycles;
                rolls = run.totals.rolls;
            }
        }
        CHECK(os_cycles[0] == os_cycles[1] + rolls); // one CPM cycle per roll
    }

    TEST_CASE("batches beyond the feature memory run in passes") {
        MemGeometry g;
        g.fm_row_words = 4;
        g.fm_rows = 64;
        const std::vector<int> sizes{40, 30, 6};
        const auto model = goldref::random_model(sizes, 70);
        const Matrix16 in = goldref::random_features(10, 40, 71);
        SimConfig cfg;
        cfg.geom = g;
        CHECK(max_batches_in_memory(sizes, g) == 4);
        const ModelRun run = run_model(model, in, cfg);
        CHECK(run.passes == 3);
        CHECK(run.layers.size() == 6);
        CHECK(run.layer_outputs == goldref::mlp_forward(model, in));
    }

    TEST_CASE("a small W-Mem refills blocks and stays exact") {
        SimConfig cfg;
        cfg.geom.w_rows = 120; // one 100-row block of 128 neurons at a time
        const std::vector<int> sizes{100, 300};
        const auto model = goldref::random_model(sizes, 80);
        const Matrix16 in = goldref::random_features(1, 100, 81);
        const ModelRun run = run_model(model, in, cfg);
        CHECK(run.layer_outputs == goldref::mlp_forward(model, in));
        CHECK(run.totals.w_mem_writes == 300);
        cfg.geom.w_rows = 50;
        CHECK_THROWS_AS(run_model(model, in, cfg), CapacityError);
    }

    TEST_CASE("a layer wider than the feature memory is rejected") {
        SimConfig cfg;
        cfg.geom.fm_rows = 2;
        const std::vector<int> sizes{200, 4};
        CHECK_THROWS_AS(run_model(goldref::random_model(sizes, 1), goldref::random_features(1, 200, 1), cfg),
                        CapacityError);
    }

    TEST_CASE("schedules that do not match the layer are rejected") {
        Walkthrough wt;
        auto attempt = [&](std::vector<mapper::ScheduleEvent> ev) {
            NpeSimulator sim(wt.cfg);
            sim.load_inputs(wt.inputs);
            sim.run_layer(ev, wt.model.weights[0]);
        };
        CHECK_NOTHROW(attempt(wt.events));
        auto missing = wt.events;
        missing.pop_back();
        CHECK_THROWS_AS(attempt(missing), ConfigError);
        auto twice = wt.events;
        twice.push_back(twice.back());
        CHECK_THROWS_AS(attempt(twice), ConfigError);
        auto slow = wt.events;
        slow[0].cycles_per_roll = 200;
        CHECK_THROWS_AS(attempt(slow), ConfigError);
        auto illegal = wt.events;
        illegal[0].config = {3, 40};
        CHECK_THROWS_AS(attempt(illegal), ConfigError);

        NpeSimulator sim(wt.cfg);
        sim.load_inputs(goldref::random_features(2, 199, 1));
        CHECK_THROWS_AS(sim.run_layer(wt.events, wt.model.weights[0]), ConfigError);
    }

    TEST_CASE("identical inputs give identical counters") {
        const std::vector<int> sizes{33, 21, 4};
        const auto model = goldref::random_model(sizes, 90);
        const Matrix16 in = goldref::random_features(2, 33, 91);
        const ModelRun a = run_model(model, in, SimConfig{});
        const ModelRun b = run_model(model, in, SimConfig{});
        CHECK(a.totals == b.totals);
        CHECK(a.layer_outputs == b.layer_outputs);
        CHECK(a.totals.rlc_bytes_in > 0);
    }
}
