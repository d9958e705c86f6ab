#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tcdnpe/fixed.hpp"
#include "tcdnpe/matrix.hpp"

namespace tcdnpe::goldref {

// Signed sum of products, reduced to kAccBits two's complement.
std::int64_t exact_dot(std::span<const OperandPair> pairs);
std::int64_t exact_dot(std::span<const std::int16_t> a, std::span<const std::int16_t> b);

// Fully connected, bias-free MLP. weights[l] is layer_sizes[l] x layer_sizes[l + 1],
// indexed (input neuron, output neuron).
struct MlpModel {
    std::vector<int> layer_sizes;
    std::vector<Matrix16> weights;

    std::size_t layer_count() const { return weights.size(); }
    // Throws FormatError when the matrices disagree with layer_sizes.
    void validate() const;
};

// Seeded uniform weights in [lo, hi].
MlpModel random_model(std::span<const int> layer_sizes, std::uint64_t seed, int lo = -256, int hi = 255);
Matrix16 random_features(std::size_t batches, std::size_t features, std::uint64_t seed, int lo = 0,
                         int hi = 511);

// Outputs of every non-input layer, each batches x layer_sizes[l + 1]. Every
// neuron, including the output layer, goes through quantize_relu.
std::vector<Matrix16> mlp_forward(const MlpModel& model, const Matrix16& inputs, QuantConfig quant = {});

// ---- Binary weight / feature files ----------------------------------------
// 16-byte little-endian header: magic[4], u32 version, u32 rows, u32 cols,
// followed by rows * cols little-endian int16 words, row-major.
// A weight file is one "TCDW" record per layer; a feature file is one "TCDF" record.

inline constexpr std::uint32_t kWireVersion = 1;

void write_model(std::ostream& out, const MlpModel& model);
MlpModel read_model(std::istream& in);
void write_features(std::ostream& out, const Matrix16& features);
Matrix16 read_features(std::istream& in);

MlpModel load_model_file(const std::string& path);
Matrix16 load_features_file(const std::string& path);

} // namespace tcdnpe::goldref
