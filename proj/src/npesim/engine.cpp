#include "tcdnpe/npesim/engine.hpp"

#include <algorithm>
#include <string>

#include "tcdnpe/bitmac/tcd_mac.hpp"
#include "tcdnpe/error.hpp"
#include "tcdnpe/npesim/rlc.hpp"
#include "tcdnpe/ppamodel/ppa.hpp"
#include "tcdnpe/simd/kernels.hpp"

namespace tcdnpe::npesim {

NpeSimulator::NpeSimulator(SimConfig cfg)
    : cfg_(std::move(cfg)), wmem_(cfg_.geom.w_rows, cfg_.geom.w_row_words),
      fm_{MemImage(cfg_.geom.fm_rows, cfg_.geom.fm_row_words), MemImage(cfg_.geom.fm_rows, cfg_.geom.fm_row_words)} {
    cfg_.geom.validate();
    mapper::enumerate_configs(cfg_.shape); // validates the shape
}

EngineCounters NpeSimulator::load_inputs(const Matrix16& batches) {
    FeatureImage img = layout_features(batches, cfg_.geom);
    EngineCounters c;
    c.fm_mem_writes = img.image.write_count();
    c.rlc_bytes_in = rlc_encode(word_bytes(batches.data)).size();
    fm_[0] = std::move(img.image);
    active_ = 0;
    layout_ = img.layout;
    return c;
}

Matrix16 NpeSimulator::current_features() const {
    return read_back_features(fm_[static_cast<std::size_t>(active_)], layout_);
}

const CastPattern& NpeSimulator::pattern_for(const mapper::NpeConfig& cfg) {
    auto it = patterns_.find(cfg);
    if (it == patterns_.end()) {
        it = patterns_.emplace(cfg, make_cast_pattern(cfg, cfg_.shape)).first;
    }
    return it->second;
}

WeightBlock NpeSimulator::ensure_block(const Matrix16& weights, int begin, int count, int slot, EngineCounters& c) {
    const auto key = std::make_tuple(begin, count, slot);
    if (auto it = resident_.find(key); it != resident_.end()) {
        return it->second;
    }
    const int rows = weight_block_rows(static_cast<int>(weights.rows), slot, cfg_.geom);
    if (rows > cfg_.geom.w_rows) {
        throw CapacityError("a " + std::to_string(slot) + "-neuron weight block of " + std::to_string(weights.rows) +
                            " inputs needs " + std::to_string(rows) + " W-Mem rows, " +
                            std::to_string(cfg_.geom.w_rows) + " available");
    }
    if (next_free_row_ + rows > cfg_.geom.w_rows) {
        // W-Mem full: refill from the top.
        resident_.clear();
        next_free_row_ = 0;
    }
    const WeightBlock blk = write_weight_block(wmem_, next_free_row_, weights, begin, count, slot);
    next_free_row_ += blk.row_count;

    std::vector<std::int16_t> payload;
    payload.reserve(weights.rows * static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < weights.rows; ++i) {
        for (int n = 0; n < count; ++n) {
            payload.push_back(weights.at(i, static_cast<std::size_t>(begin + n)));
        }
    }
    c.rlc_bytes_in += rlc_encode(word_bytes(payload)).size();
    resident_.emplace(key, blk);
    return blk;
}

void NpeSimulator::validate_events(std::span<const mapper::ScheduleEvent> events, const Matrix16& weights) const {
    const int inputs = static_cast<int>(weights.rows);
    const int neurons = static_cast<int>(weights.cols);
    const int batches = layout_.batches;
    auto fail = [](const std::string& why) { throw ConfigError("schedule does not match the layer: " + why); };

    if (inputs != layout_.features) {
        fail("weights expect " + std::to_string(inputs) + " inputs, feature memory holds " +
             std::to_string(layout_.features));
    }
    std::vector<int> covered(static_cast<std::size_t>(batches) * static_cast<std::size_t>(neurons), 0);
    for (const mapper::ScheduleEvent& ev : events) {
        if (!mapper::is_legal(ev.config, cfg_.shape)) {
            fail("illegal configuration NPE(" + std::to_string(ev.config.batches) + "," +
                 std::to_string(ev.config.neurons) + ")");
        }
        if (ev.load.batches < 1 || ev.load.batches > ev.config.batches || ev.load.neurons < 1 ||
            ev.load.neurons > ev.config.neurons) {
            fail("load exceeds its configuration");
        }
        if (ev.cycles_per_roll != inputs + roll_overhead(cfg_.dataflow)) {
            fail("event expects " + std::to_string(ev.cycles_per_roll) + " cycles per roll");
        }
        if (ev.rolls != ev.batch_groups * ev.neuron_groups || ev.rolls < 1) {
            fail("roll count inconsistent with its groups");
        }
        const int b_end = ev.batch_begin + ev.batch_groups * ev.load.batches;
        const int n_end = ev.neuron_begin + ev.neuron_groups * ev.load.neurons;
        if (ev.batch_begin < 0 || ev.neuron_begin < 0 || b_end > batches || n_end > neurons) {
            fail("event reaches outside the problem");
        }
        for (int b = ev.batch_begin; b < b_end; ++b) {
            for (int n = ev.neuron_begin; n < n_end; ++n) {
                ++covered[static_cast<std::size_t>(b) * neurons + n];
            }
        }
    }
    if (std::any_of(covered.begin(), covered.end(), [](int v) { return v != 1; })) {
        fail("events do not cover every (batch, neuron) pair exactly once");
    }
}

void NpeSimulator::run_roll(const WeightBlock& blk, std::span<const ActivePe> pes, int neuron_begin,
                            const FeatureLayout& out_layout) {
    const int inputs = layout_.features;
    MemImage& in = fm_[static_cast<std::size_t>(active_)];
    MemImage& out = fm_[static_cast<std::size_t>(1 - active_)];
    const std::size_t lanes = pes.size();
    const bitmac::MacGeometry geom{};

    std::vector<bitmac::TcdMac> gate;
    std::vector<bitmac::ConvMac> conv;
    std::vector<std::uint64_t> sum;
    std::vector<std::uint64_t> carry;
    std::vector<std::int16_t> lane_a;
    std::vector<std::int16_t> lane_b;

    const bool tcd = uses_tcd_mac(cfg_.dataflow);
    const bool packed = tcd && cfg_.backend == MacBackend::Packed;
    if (!tcd) {
        conv.assign(lanes, bitmac::ConvMac(geom));
    } else if (packed) {
        sum.assign(lanes, 0);
        carry.assign(lanes, 0);
        lane_a.resize(lanes);
        lane_b.resize(lanes);
    } else {
        gate.assign(lanes, bitmac::TcdMac(geom));
    }

    // One-row read buffers in front of each memory.
    int w_row = -1;
    int f_row = -1;
    std::span<const std::int16_t> w_buf;
    std::span<const std::int16_t> f_buf;

    for (int i = 0; i < inputs; ++i) {
        if (const int r = blk.row_of(i); r != w_row) {
            w_buf = wmem_.read_row(r);
            w_row = r;
        }
        if (const int r = layout_.row_of(i); r != f_row) {
            f_buf = in.read_row(r);
            f_row = r;
        }
        for (std::size_t p = 0; p < lanes; ++p) {
            const std::int16_t feature = f_buf[static_cast<std::size_t>(layout_.word_of(pes[p].batch, i))];
            const std::int16_t weight = w_buf[static_cast<std::size_t>(blk.word_of(i, pes[p].neuron_slot))];
            if (packed) {
                lane_a[p] = feature;
                lane_b[p] = weight;
            } else if (tcd) {
                gate[p].accumulate(feature, weight);
            } else {
                conv[p].accumulate(feature, weight);
            }
        }
        if (packed) {
            simd::csa_accumulate(sum, carry, lane_a, lane_b, geom.mask());
        }
    }

    for (std::size_t p = 0; p < lanes; ++p) {
        std::int64_t acc = 0;
        if (packed) {
            acc = sign_extend(bitmac::pcpa(sum[p], carry[p], geom.acc_bits), geom.acc_bits);
        } else if (tcd) {
            acc = gate[p].finish();
        } else {
            acc = conv[p].finish();
        }
        const int neuron = neuron_begin + pes[p].neuron_slot;
        out.write_word(out_layout.row_of(neuron), out_layout.word_of(pes[p].batch, neuron),
                       quantize_relu(acc, cfg_.quant));
    }
}

LayerReport NpeSimulator::run_layer(std::span<const mapper::ScheduleEvent> events, const Matrix16& weights) {
    validate_events(events, weights);

    const int inputs = static_cast<int>(weights.rows);
    const int neurons = static_cast<int>(weights.cols);
    const int batches = layout_.batches;
    const FeatureLayout out_layout = plan_features(batches, neurons, cfg_.geom);

    LayerReport rep;
    rep.layer = events.empty() ? 0 : events.front().layer;
    rep.problem = {batches, inputs, neurons};
    rep.events.assign(events.begin(), events.end());
    rep.fm_cycles_per_read = layout_.segment_words;

    EngineCounters& c = rep.counters;
    const MemImage& in = fm_[static_cast<std::size_t>(active_)];
    const MemImage& out = fm_[static_cast<std::size_t>(1 - active_)];
    const std::uint64_t w_reads0 = wmem_.read_count();
    const std::uint64_t w_writes0 = wmem_.write_count();
    const std::uint64_t fm_reads0 = in.read_count();
    const std::uint64_t fm_writes0 = out.word_write_count();

    // A new layer of interest: the W-Mem is refilled with its weights.
    resident_.clear();
    next_free_row_ = 0;

    const auto in_cycles = static_cast<std::uint64_t>(inputs);
    std::vector<ActivePe> pes;
    for (const mapper::ScheduleEvent& ev : events) {
        const CastPattern& pattern = pattern_for(ev.config);
        for (int ng = 0; ng < ev.neuron_groups; ++ng) {
            const int n_begin = ev.neuron_begin + ng * ev.load.neurons;
            const WeightBlock blk = ensure_block(weights, n_begin, ev.load.neurons, ev.config.neurons, c);
            for (int bg = 0; bg < ev.batch_groups; ++bg) {
                const int b_begin = ev.batch_begin + bg * ev.load.batches;
                pes.clear();
                // Partial loads gate off the PEs whose slots fall outside (K*, N*).
                for (int pe = 0; pe < cfg_.shape.total(); ++pe) {
                    const int bslot = pattern.batch_slot_of_pe(pe);
                    const int nslot = pattern.pe_neuron_slot[static_cast<std::size_t>(pe)];
                    if (bslot < ev.load.batches && nslot < ev.load.neurons) {
                        pes.push_back({b_begin + bslot, nslot});
                    }
                }
                run_roll(blk, pes, n_begin, out_layout);

                const auto active = static_cast<std::uint64_t>(pes.size());
                const auto cycles = in_cycles + static_cast<std::uint64_t>(roll_overhead(cfg_.dataflow));
                c.rolls += 1;
                c.mac_ops += active * in_cycles;
                c.total_cycles += cycles;
                c.pe_active_cycles += active * cycles;
                if (cfg_.dataflow == Dataflow::Nlr) {
                    const auto row = static_cast<std::uint64_t>(cfg_.geom.fm_row_words);
                    const std::uint64_t rows_per_cycle = (active + row - 1) / row;
                    c.psum_reads += rows_per_cycle * in_cycles;
                    c.psum_writes += rows_per_cycle * in_cycles;
                }
            }
        }
    }

    if (cfg_.dataflow == Dataflow::Rna) {
        c.total_cycles = ppa::rna_layer_cycles(batches, inputs, neurons, cfg_.shape.total());
        c.pe_active_cycles = ppa::rna_layer_ops(batches, inputs, neurons);
    }

    c.w_mem_reads = wmem_.read_count() - w_reads0;
    c.w_mem_writes = wmem_.write_count() - w_writes0;
    c.fm_mem_reads = in.read_count() - fm_reads0;
    c.fm_mem_writes = out.word_write_count() - fm_writes0;
    rep.utilization = mapper::utilization(events, rep.problem, cfg_.shape);

    active_ = 1 - active_;
    layout_ = out_layout;
    return rep;
}

int max_batches_in_memory(std::span<const int> layer_sizes, const MemGeometry& geom) {
    if (layer_sizes.empty()) {
        return 0;
    }
    const int widest = *std::max_element(layer_sizes.begin(), layer_sizes.end());
    for (int b = geom.fm_row_words; b >= 1; --b) {
        const int seg = geom.fm_row_words / b;
        if ((widest + seg - 1) / seg <= geom.fm_rows) {
            return b;
        }
    }
    return 0;
}

ModelRun run_model(const goldref::MlpModel& model, const Matrix16& inputs, const SimConfig& cfg) {
    model.validate();
    if (inputs.cols != static_cast<std::size_t>(model.layer_sizes.front()) || inputs.rows == 0) {
        throw ConfigError("inputs are " + std::to_string(inputs.rows) + "x" + std::to_string(inputs.cols) +
                          ", model expects B x " + std::to_string(model.layer_sizes.front()));
    }
    const int fit = max_batches_in_memory(model.layer_sizes, cfg.geom);
    if (fit == 0) {
        throw CapacityError("the widest layer does not fit the FM-Mem even for one batch; the feature memory "
                            "must hold at least one full layer");
    }

    ModelRun run;
    for (std::size_t l = 1; l < model.layer_sizes.size(); ++l) {
        run.layer_outputs.emplace_back(inputs.rows, static_cast<std::size_t>(model.layer_sizes[l]));
    }

    mapper::ScheduleOptions opts;
    opts.cycles_overhead = roll_overhead(cfg.dataflow);
    opts.allowed = cfg.allowed;

    int first = 0;
    const std::vector<int> passes = mapper::split_batches(static_cast<int>(inputs.rows), fit);
    for (std::size_t pass = 0; pass < passes.size(); ++pass) {
        const int pb = passes[pass];
        Matrix16 slice(static_cast<std::size_t>(pb), inputs.cols);
        for (int b = 0; b < pb; ++b) {
            std::copy_n(inputs.row(static_cast<std::size_t>(first + b)).begin(), inputs.cols,
                        slice.row(static_cast<std::size_t>(b)).begin());
        }

        NpeSimulator sim(cfg);
        run.totals += sim.load_inputs(slice);
        for (std::size_t l = 0; l < model.weights.size(); ++l) {
            const mapper::LayerProblem p{pb, model.layer_sizes[l], model.layer_sizes[l + 1]};
            const auto events = mapper::schedule_layer(p, cfg.shape, static_cast<int>(l + 1), opts);
            LayerReport rep = sim.run_layer(events, model.weights[l]);
            rep.pass = static_cast<int>(pass);
            run.totals += rep.counters;
            run.layers.push_back(std::move(rep));

            const Matrix16 out = sim.current_features();
            for (int b = 0; b < pb; ++b) {
                std::copy_n(out.row(static_cast<std::size_t>(b)).begin(), out.cols,
                            run.layer_outputs[l].row(static_cast<std::size_t>(first + b)).begin());
            }
        }
        first += pb;
    }
    run.passes = static_cast<int>(passes.size());
    return run;
}

} // namespace tcdnpe::npesim
