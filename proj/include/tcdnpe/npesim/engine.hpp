#pragma once

#include <array>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "tcdnpe/dataflow.hpp"
#include "tcdnpe/fixed.hpp"
#include "tcdnpe/goldref/goldref.hpp"
#include "tcdnpe/mapper/mapper.hpp"
#include "tcdnpe/matrix.hpp"
#include "tcdnpe/npesim/cast.hpp"
#include "tcdnpe/npesim/memory.hpp"

namespace tcdnpe::npesim {

// How TCD-MAC PEs are evaluated. Gate runs the bit-level column model of every
// PE; Packed runs all active PEs of a roll as lanes of the SIMD carry-save
// kernel. Both are bit-exact on outputs; only Gate exposes CEL internals.
enum class MacBackend { Gate, Packed };

struct SimConfig {
    mapper::ArrayShape shape;
    MemGeometry geom;
    Dataflow dataflow = Dataflow::OsTcd;
    MacBackend backend = MacBackend::Gate;
    QuantConfig quant;
    // Restricts the mapper to these configurations; empty means all legal ones.
    std::vector<mapper::NpeConfig> allowed;
};

// Cycles a roll spends beyond its I streaming cycles.
constexpr int roll_overhead(Dataflow d) { return d == Dataflow::OsTcd ? 1 : 0; }

struct LayerReport {
    int pass = 0;
    int layer = 0;
    mapper::LayerProblem problem;
    std::vector<mapper::ScheduleEvent> events;
    EngineCounters counters;
    double utilization = 0;
    // Streaming cycles served by one FM-Mem row read (row_words / B).
    int fm_cycles_per_read = 0;
};

// One TCD-NPE: PE array, W-Mem and two ping-pong FM-Mem banks. Single owner,
// deterministic.
class NpeSimulator {
public:
    explicit NpeSimulator(SimConfig cfg);

    // Transfers the B x I input batches into the active FM bank.
    EngineCounters load_inputs(const Matrix16& batches);

    // Executes one layer's events: reads the active bank, writes the other
    // one, then swaps them. Throws ConfigError when the events do not cover
    // B x U exactly once or do not match the layer's dimensions.
    LayerReport run_layer(std::span<const mapper::ScheduleEvent> events, const Matrix16& weights);

    // Features of the active bank (inputs, or the last layer's outputs).
    Matrix16 current_features() const;
    const FeatureLayout& feature_layout() const { return layout_; }

    const MemImage& w_mem() const { return wmem_; }
    const MemImage& fm_bank(int i) const { return fm_[static_cast<std::size_t>(i)]; }
    int active_bank() const { return active_; }
    const SimConfig& config() const { return cfg_; }

private:
    struct ActivePe {
        int batch;
        int neuron_slot;
    };

    const CastPattern& pattern_for(const mapper::NpeConfig& cfg);
    WeightBlock ensure_block(const Matrix16& weights, int begin, int count, int slot, EngineCounters& c);
    void validate_events(std::span<const mapper::ScheduleEvent> events, const Matrix16& weights) const;
    void run_roll(const WeightBlock& blk, std::span<const ActivePe> pes, int neuron_begin,
                  const FeatureLayout& out_layout);

    SimConfig cfg_;
    MemImage wmem_;
    std::array<MemImage, 2> fm_;
    int active_ = 0;
    FeatureLayout layout_;
    int next_free_row_ = 0;
    std::map<std::tuple<int, int, int>, WeightBlock> resident_;
    std::map<mapper::NpeConfig, CastPattern> patterns_;
};

struct ModelRun {
    std::vector<Matrix16> layer_outputs; // per computed layer, B x U
    std::vector<LayerReport> layers;     // per pass and layer
    EngineCounters totals;
    int passes = 0;

    const Matrix16& outputs() const { return layer_outputs.back(); }
};

// Largest batch count whose biggest layer still fits one FM-Mem bank (0 if none).
int max_batches_in_memory(std::span<const int> layer_sizes, const MemGeometry& geom);

// Schedules and simulates every layer. Batches beyond the feature memory's
// capacity are processed in successive passes.
ModelRun run_model(const goldref::MlpModel& model, const Matrix16& inputs, const SimConfig& cfg);

} // namespace tcdnpe::npesim
