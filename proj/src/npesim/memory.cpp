#include "tcdnpe/npesim/memory.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

#include "tcdnpe/error.hpp"

namespace tcdnpe::npesim {

void MemGeometry::validate() const {
    if (w_row_words < 1 || fm_row_words < 1 || w_rows < 1 || fm_rows < 1) {
        throw ConfigError("memory geometry fields must all be >= 1");
    }
}

MemImage::MemImage(int rows, int row_words)
    : rows_(rows), row_words_(row_words),
      words_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(row_words), 0) {}

void MemImage::check(int row, int word) const {
    if (row < 0 || row >= rows_ || word < 0 || word >= row_words_) {
        throw ConfigError("memory access out of range: row " + std::to_string(row) + " word " +
                          std::to_string(word) + " in a " + std::to_string(rows_) + "x" +
                          std::to_string(row_words_) + " image");
    }
}

std::span<const std::int16_t> MemImage::read_row(int row) {
    check(row, 0);
    ++reads_;
    return {words_.data() + static_cast<std::size_t>(row) * row_words_, static_cast<std::size_t>(row_words_)};
}

void MemImage::write_row(int row, std::span<const std::int16_t> words) {
    check(row, 0);
    if (words.size() != static_cast<std::size_t>(row_words_)) {
        throw ConfigError("row write of " + std::to_string(words.size()) + " words into a " +
                          std::to_string(row_words_) + "-word row");
    }
    std::copy(words.begin(), words.end(), words_.begin() + static_cast<std::ptrdiff_t>(row) * row_words_);
    ++row_writes_;
}

void MemImage::write_word(int row, int word, std::int16_t value) {
    check(row, word);
    words_[static_cast<std::size_t>(row) * row_words_ + word] = value;
    ++word_writes_;
}

std::int16_t MemImage::peek(int row, int word) const {
    check(row, word);
    return words_[static_cast<std::size_t>(row) * row_words_ + word];
}

void MemImage::dump_hex(std::ostream& out, int max_rows) const {
    const int n = max_rows < 0 ? rows_ : std::min(rows_, max_rows);
    char buf[8];
    for (int r = 0; r < n; ++r) {
        for (int w = 0; w < row_words_; ++w) {
            std::snprintf(buf, sizeof buf, "%04x", static_cast<unsigned>(static_cast<std::uint16_t>(peek(r, w))));
            if (w != 0) {
                out << ' ';
            }
            out << buf;
        }
        out << '\n';
    }
}

int weight_block_rows(int inputs, int slot_width, const MemGeometry& geom) {
    if (slot_width < 1 || slot_width > geom.w_row_words) {
        throw CapacityError("a " + std::to_string(slot_width) + "-neuron weight slot does not fit a " +
                            std::to_string(geom.w_row_words) + "-word W-Mem row");
    }
    const int per_row = geom.w_row_words / slot_width;
    return (inputs + per_row - 1) / per_row;
}

WeightBlock write_weight_block(MemImage& mem, int first_row, const Matrix16& weights, int neuron_begin, int count,
                               int slot_width) {
    const int inputs = static_cast<int>(weights.rows);
    if (count < 1 || count > slot_width || neuron_begin + count > static_cast<int>(weights.cols)) {
        throw ConfigError("weight block neurons out of range");
    }
    if (slot_width > mem.row_words()) {
        throw CapacityError("weight slot wider than a W-Mem row");
    }
    WeightBlock blk;
    blk.neuron_begin = neuron_begin;
    blk.neuron_count = count;
    blk.slot_width = slot_width;
    blk.inputs_per_row = mem.row_words() / slot_width;
    blk.first_row = first_row;
    blk.row_count = (inputs + blk.inputs_per_row - 1) / blk.inputs_per_row;
    if (first_row + blk.row_count > mem.rows()) {
        throw CapacityError("weight block of " + std::to_string(blk.row_count) + " rows does not fit the W-Mem (" +
                            std::to_string(mem.rows() - first_row) + " rows free)");
    }

    std::vector<std::int16_t> row(static_cast<std::size_t>(mem.row_words()));
    for (int r = 0; r < blk.row_count; ++r) {
        std::fill(row.begin(), row.end(), std::int16_t{0});
        for (int j = 0; j < blk.inputs_per_row; ++j) {
            const int input = r * blk.inputs_per_row + j;
            if (input >= inputs) {
                break;
            }
            for (int n = 0; n < count; ++n) {
                row[static_cast<std::size_t>(j * slot_width + n)] =
                    weights.at(static_cast<std::size_t>(input), static_cast<std::size_t>(neuron_begin + n));
            }
        }
        mem.write_row(first_row + r, row);
    }
    return blk;
}

WeightLayout layout_weights(const Matrix16& weights, int slot_width, const MemGeometry& geom) {
    geom.validate();
    const int inputs = static_cast<int>(weights.rows);
    const int neurons = static_cast<int>(weights.cols);
    const int groups = (neurons + slot_width - 1) / slot_width;
    const int needed = groups * weight_block_rows(inputs, slot_width, geom);
    if (needed > geom.w_rows) {
        throw CapacityError("layer does not fit the W-Mem: " + std::to_string(needed) + " rows needed, " +
                            std::to_string(geom.w_rows) + " available");
    }
    WeightLayout out{MemImage(geom.w_rows, geom.w_row_words), {}};
    int row = 0;
    for (int g = 0; g < groups; ++g) {
        const int begin = g * slot_width;
        const WeightBlock blk =
            write_weight_block(out.image, row, weights, begin, std::min(slot_width, neurons - begin), slot_width);
        row += blk.row_count;
        out.blocks.push_back(blk);
    }
    return out;
}

Matrix16 read_back_weights(const WeightLayout& layout, int inputs, int neurons) {
    Matrix16 w(static_cast<std::size_t>(inputs), static_cast<std::size_t>(neurons));
    for (const WeightBlock& blk : layout.blocks) {
        for (int i = 0; i < inputs; ++i) {
            for (int n = 0; n < blk.neuron_count; ++n) {
                w.at(static_cast<std::size_t>(i), static_cast<std::size_t>(blk.neuron_begin + n)) =
                    layout.image.peek(blk.row_of(i), blk.word_of(i, n));
            }
        }
    }
    return w;
}

FeatureLayout plan_features(int batches, int features, const MemGeometry& geom) {
    geom.validate();
    if (batches < 1 || features < 1) {
        throw ConfigError("feature layout needs at least one batch and one feature");
    }
    FeatureLayout l;
    l.batches = batches;
    l.features = features;
    l.segment_words = geom.fm_row_words / batches;
    if (l.segment_words < 1) {
        throw CapacityError(std::to_string(batches) + " batches do not fit a " + std::to_string(geom.fm_row_words) +
                            "-word FM-Mem row");
    }
    l.row_count = (features + l.segment_words - 1) / l.segment_words;
    if (l.row_count > geom.fm_rows) {
        throw CapacityError("layer does not fit the FM-Mem: " + std::to_string(features) + " features of " +
                            std::to_string(batches) + " batches need " + std::to_string(l.row_count) +
                            " rows, the feature memory must hold at least one full layer");
    }
    return l;
}

FeatureImage layout_features(const Matrix16& batches, const MemGeometry& geom) {
    const FeatureLayout l = plan_features(static_cast<int>(batches.rows), static_cast<int>(batches.cols), geom);
    FeatureImage out{MemImage(geom.fm_rows, geom.fm_row_words), l};
    std::vector<std::int16_t> row(static_cast<std::size_t>(geom.fm_row_words));
    for (int r = 0; r < l.row_count; ++r) {
        std::fill(row.begin(), row.end(), std::int16_t{0});
        for (int b = 0; b < l.batches; ++b) {
            for (int k = 0; k < l.segment_words; ++k) {
                const int f = r * l.segment_words + k;
                if (f >= l.features) {
                    break;
                }
                row[static_cast<std::size_t>(l.word_of(b, f))] =
                    batches.at(static_cast<std::size_t>(b), static_cast<std::size_t>(f));
            }
        }
        out.image.write_row(r, row);
    }
    return out;
}

Matrix16 read_back_features(const MemImage& image, const FeatureLayout& layout) {
    Matrix16 m(static_cast<std::size_t>(layout.batches), static_cast<std::size_t>(layout.features));
    for (int b = 0; b < layout.batches; ++b) {
        for (int f = 0; f < layout.features; ++f) {
            m.at(static_cast<std::size_t>(b), static_cast<std::size_t>(f)) =
                image.peek(layout.row_of(f), layout.word_of(b, f));
        }
    }
    return m;
}

} // namespace tcdnpe::npesim
