#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cassert>
#include <cstdint>

#include "tcdnpe/fixed.hpp"

namespace tcdnpe::bitmac {

// An ordered multiset of bits of one significance. Bit k of `bits` is the k-th
// wire entering the column; zeros are real wires (AND-gate outputs), not padding.
class Column {
public:
    static constexpr int kCapacity = 64;

    void push(bool bit) {
        assert(size_ < kCapacity);
        bits_ |= std::uint64_t{bit} << size_;
        ++size_;
    }

    // Appends wires [first, size) of another column, in order.
    void append_from(const Column& other, int first) {
        const int count = other.size_ - first;
        if (count <= 0) {
            return;
        }
        assert(size_ + count <= kCapacity);
        bits_ |= ((other.bits_ >> first) & acc_mask(count)) << size_;
        size_ += count;
    }

    int size() const { return size_; }
    int ones() const { return std::popcount(bits_); }
    bool bit(int k) const { return ((bits_ >> k) & 1U) != 0; }
    std::uint64_t wires() const { return bits_; }

    // Population count of wires [first, first + count).
    int ones_in(int first, int count) const {
        const std::uint64_t window = count >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << count) - 1;
        return std::popcount((bits_ >> first) & window);
    }

private:
    std::uint64_t bits_ = 0;
    int size_ = 0;
};

// Partial-product bits grouped by significance, positions [0, width).
// Bits pushed at or beyond `width` are dropped (arithmetic is modulo 2^width).
class BitColumns {
public:
    explicit BitColumns(int width = kAccBits) : width_(width) {
        assert(width >= 1 && width <= kMaxAccBits);
    }

    int width() const { return width_; }
    Column& operator[](int pos) { return cols_[static_cast<std::size_t>(pos)]; }
    const Column& operator[](int pos) const { return cols_[static_cast<std::size_t>(pos)]; }

    void push(int pos, bool bit) {
        if (pos < width_) {
            cols_[static_cast<std::size_t>(pos)].push(bit);
        }
    }

    // Adds every bit of row[0, count) as one wire at positions shift .. shift + count - 1.
    void push_row(std::uint64_t row, int shift, int count) {
        for (int k = 0; k < count; ++k) {
            push(shift + k, ((row >> k) & 1U) != 0);
        }
    }

    int max_height() const {
        int h = 0;
        for (int p = 0; p < width_; ++p) {
            h = std::max(h, cols_[static_cast<std::size_t>(p)].size());
        }
        return h;
    }

    // Sum over positions of (ones at p) * 2^p, modulo 2^width.
    std::uint64_t value() const {
        std::uint64_t v = 0;
        for (int p = 0; p < width_; ++p) {
            v += static_cast<std::uint64_t>(cols_[static_cast<std::size_t>(p)].ones()) << p;
        }
        return v & acc_mask(width_);
    }

private:
    int width_;
    std::array<Column, kMaxAccBits> cols_{};
};

} // namespace tcdnpe::bitmac
