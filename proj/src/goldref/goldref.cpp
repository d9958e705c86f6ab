#include "tcdnpe/goldref/goldref.hpp"

#include <random>
#include <string>

#include "tcdnpe/error.hpp"
#include "tcdnpe/simd/kernels.hpp"

namespace tcdnpe::goldref {

namespace {

// Maps raw engine output onto [lo, hi] without relying on library distributions,
// so reports are identical across standard library implementations.
std::int16_t draw(std::mt19937_64& rng, int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return static_cast<std::int16_t>(lo + static_cast<int>(rng() % span));
}

} // namespace

std::int64_t exact_dot(std::span<const OperandPair> pairs) {
    std::int64_t acc = 0;
    for (const OperandPair& p : pairs) {
        acc += std::int64_t{p.a} * std::int64_t{p.b};
    }
    return wrap_to(acc, kAccBits);
}

std::int64_t exact_dot(std::span<const std::int16_t> a, std::span<const std::int16_t> b) {
    if (a.size() != b.size()) {
        throw ConfigError("exact_dot: operand vectors differ in length");
    }
    return wrap_to(simd::dot_i16(a, b), kAccBits);
}

void MlpModel::validate() const {
    if (layer_sizes.size() < 2) {
        throw FormatError("model needs at least an input and one more layer");
    }
    if (weights.size() != layer_sizes.size() - 1) {
        throw FormatError("model has " + std::to_string(weights.size()) + " weight matrices for " +
                          std::to_string(layer_sizes.size()) + " layers");
    }
    for (std::size_t l = 0; l < weights.size(); ++l) {
        const auto in = static_cast<std::size_t>(layer_sizes[l]);
        const auto out = static_cast<std::size_t>(layer_sizes[l + 1]);
        if (weights[l].rows != in || weights[l].cols != out) {
            throw FormatError("weight matrix " + std::to_string(l) + " is " + std::to_string(weights[l].rows) +
                              "x" + std::to_string(weights[l].cols) + ", expected " + std::to_string(in) +
                              "x" + std::to_string(out));
        }
    }
}

MlpModel random_model(std::span<const int> layer_sizes, std::uint64_t seed, int lo, int hi) {
    MlpModel m;
    m.layer_sizes.assign(layer_sizes.begin(), layer_sizes.end());
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        Matrix16 w(static_cast<std::size_t>(layer_sizes[l]), static_cast<std::size_t>(layer_sizes[l + 1]));
        for (auto& v : w.data) {
            v = draw(rng, lo, hi);
        }
        m.weights.push_back(std::move(w));
    }
    return m;
}

Matrix16 random_features(std::size_t batches, std::size_t features, std::uint64_t seed, int lo, int hi) {
    std::mt19937_64 rng(seed);
    Matrix16 f(batches, features);
    for (auto& v : f.data) {
        v = draw(rng, lo, hi);
    }
    return f;
}

std::vector<Matrix16> mlp_forward(const MlpModel& model, const Matrix16& inputs, QuantConfig quant) {
    model.validate();
    if (inputs.cols != static_cast<std::size_t>(model.layer_sizes.front())) {
        throw ConfigError("input has " + std::to_string(inputs.cols) + " features, model expects " +
                          std::to_string(model.layer_sizes.front()));
    }
    std::vector<Matrix16> outputs;
    const Matrix16* current = &inputs;
    for (const Matrix16& w : model.weights) {
        const Matrix16 by_neuron = w.transposed();
        Matrix16 next(current->rows, w.cols);
        for (std::size_t b = 0; b < current->rows; ++b) {
            for (std::size_t u = 0; u < w.cols; ++u) {
                next.at(b, u) = quantize_relu(exact_dot(current->row(b), by_neuron.row(u)), quant);
            }
        }
        outputs.push_back(std::move(next));
        current = &outputs.back();
    }
    return outputs;
}

} // namespace tcdnpe::goldref
