#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "tcdnpe/matrix.hpp"

namespace tcdnpe::npesim {

// Word = 16 bits. Defaults: W-Mem 512 KB in 256-byte rows, FM-Mem 2 x 64 KB in 128-byte rows.
struct MemGeometry {
    int w_row_words = 128;
    int fm_row_words = 64;
    int w_rows = 2048;
    int fm_rows = 512;

    // Throws ConfigError unless every field is >= 1.
    void validate() const;
};

// Word-writable SRAM image with access counters. Reads and row writes move a
// whole row; word writes touch a single word of a row.
class MemImage {
public:
    MemImage() = default;
    MemImage(int rows, int row_words);

    int rows() const { return rows_; }
    int row_words() const { return row_words_; }

    std::span<const std::int16_t> read_row(int row);
    void write_row(int row, std::span<const std::int16_t> words);
    void write_word(int row, int word, std::int16_t value);

    // Uncounted access for inspection and inverse layouts.
    std::int16_t peek(int row, int word) const;

    std::uint64_t read_count() const { return reads_; }
    std::uint64_t write_count() const { return row_writes_; }
    std::uint64_t word_write_count() const { return word_writes_; }

    // One line per row, 4-digit lowercase hex words separated by spaces.
    void dump_hex(std::ostream& out, int max_rows = -1) const;

private:
    void check(int row, int word) const;

    int rows_ = 0;
    int row_words_ = 0;
    std::vector<std::int16_t> words_;
    std::uint64_t reads_ = 0;
    std::uint64_t row_writes_ = 0;
    std::uint64_t word_writes_ = 0;
};

// N consecutive neurons' weights. Each row packs `inputs_per_row` input
// neurons, each in a slot of `slot_width` words (the configuration's N).
struct WeightBlock {
    int neuron_begin = 0;
    int neuron_count = 0;
    int slot_width = 0;
    int inputs_per_row = 0;
    int first_row = 0;
    int row_count = 0;

    int row_of(int input) const { return first_row + input / inputs_per_row; }
    int word_of(int input, int neuron_local) const { return (input % inputs_per_row) * slot_width + neuron_local; }
};

// Rows needed by one block: ceil(I / (row_words / N)).
int weight_block_rows(int inputs, int slot_width, const MemGeometry& geom);

// Writes weights[*, neuron_begin .. neuron_begin + count) starting at first_row.
WeightBlock write_weight_block(MemImage& mem, int first_row, const Matrix16& weights, int neuron_begin, int count,
                               int slot_width);

struct WeightLayout {
    MemImage image;
    std::vector<WeightBlock> blocks;
};

// Whole layer in groups of N neurons, block after block. Throws CapacityError
// when it does not fit the W-Mem.
WeightLayout layout_weights(const Matrix16& weights, int slot_width, const MemGeometry& geom);
Matrix16 read_back_weights(const WeightLayout& layout, int inputs, int neurons);

// B batches side by side: each row holds row_words / B consecutive features
// of every batch, batch b in segment b.
struct FeatureLayout {
    int batches = 0;
    int features = 0;
    int segment_words = 0;
    int row_count = 0;

    int row_of(int feature) const { return feature / segment_words; }
    int word_of(int batch, int feature) const { return batch * segment_words + feature % segment_words; }
};

// Throws CapacityError when B exceeds the row width or the rows exceed the bank.
FeatureLayout plan_features(int batches, int features, const MemGeometry& geom);

struct FeatureImage {
    MemImage image;
    FeatureLayout layout;
};

FeatureImage layout_features(const Matrix16& batches, const MemGeometry& geom);
Matrix16 read_back_features(const MemImage& image, const FeatureLayout& layout);

} // namespace tcdnpe::npesim
