#include "tcdnpe/npesim/cast.hpp"

#include <algorithm>
#include <string>

#include "tcdnpe/error.hpp"

namespace tcdnpe::npesim {

CastPattern make_cast_pattern(const mapper::NpeConfig& config, const mapper::ArrayShape& shape) {
    if (!mapper::is_legal(config, shape)) {
        throw ConfigError("NPE(" + std::to_string(config.batches) + "," + std::to_string(config.neurons) +
                          ") is not supported by a " + std::to_string(shape.rows) + "x" +
                          std::to_string(shape.cols) + " array");
    }
    CastPattern p;
    p.config = config;
    p.shape = shape;
    const int tgs_per_batch = shape.rows / config.batches;
    p.tg_batch_slot.resize(static_cast<std::size_t>(shape.rows));
    p.pe_neuron_slot.resize(static_cast<std::size_t>(shape.total()));
    for (int tg = 0; tg < shape.rows; ++tg) {
        p.tg_batch_slot[static_cast<std::size_t>(tg)] = tg / tgs_per_batch;
        for (int c = 0; c < shape.cols; ++c) {
            p.pe_neuron_slot[static_cast<std::size_t>(tg * shape.cols + c)] = (tg % tgs_per_batch) * shape.cols + c;
        }
    }
    return p;
}

int CastPattern::feature_fanout(int batch_slot) const {
    return static_cast<int>(std::count(tg_batch_slot.begin(), tg_batch_slot.end(), batch_slot));
}

int CastPattern::weight_fanout(int neuron_slot) const {
    return static_cast<int>(std::count(pe_neuron_slot.begin(), pe_neuron_slot.end(), neuron_slot));
}

} // namespace tcdnpe::npesim
