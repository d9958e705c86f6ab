#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tcdnpe {

// Row-major matrix of 16-bit words. Weights are stored inputs x neurons,
// feature batches are stored batches x features.
struct Matrix16 {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::int16_t> data;

    Matrix16() = default;
    Matrix16(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}

    std::int16_t& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    std::int16_t at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<std::int16_t> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const std::int16_t> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    Matrix16 transposed() const {
        Matrix16 t(cols, rows);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                t.at(c, r) = at(r, c);
            }
        }
        return t;
    }

    friend bool operator==(const Matrix16&, const Matrix16&) = default;
};

} // namespace tcdnpe
