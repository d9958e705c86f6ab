#pragma once

#include <vector>

#include "tcdnpe/mapper/mapper.hpp"

namespace tcdnpe::npesim {

// LDN routing for one NPE(K, N) configuration. The rows / K TGs of batch
// slot k share one broadcast feature word; every PE gets the weight word of
// its neuron slot. PEs computing the same neuron for different batches are
// fed from the same W-Mem word.
struct CastPattern {
    mapper::NpeConfig config;
    mapper::ArrayShape shape;
    std::vector<int> tg_batch_slot;  // per TG (array row): batch slot in [0, K)
    std::vector<int> pe_neuron_slot; // per PE (row-major): neuron slot in [0, N)

    int batch_slot_of_pe(int pe) const { return tg_batch_slot[static_cast<std::size_t>(pe / shape.cols)]; }
    // TGs listening to batch slot k.
    int feature_fanout(int batch_slot) const;
    // PEs listening to weight slot n (one per batch slot).
    int weight_fanout(int neuron_slot) const;
};

// Throws ConfigError for a configuration that is illegal on `shape`.
CastPattern make_cast_pattern(const mapper::NpeConfig& config, const mapper::ArrayShape& shape);

} // namespace tcdnpe::npesim
