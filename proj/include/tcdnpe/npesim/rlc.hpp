#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tcdnpe::npesim {

// Byte-oriented run-length coding used on DRAM -> SRAM transfers:
// a sequence of (value, run) byte pairs with 1 <= run <= 255.
std::vector<std::uint8_t> rlc_encode(std::span<const std::uint8_t> bytes);

// Throws FormatError on an odd-length stream or a zero run.
std::vector<std::uint8_t> rlc_decode(std::span<const std::uint8_t> encoded);

// Little-endian byte image of 16-bit words, as they travel from DRAM.
std::vector<std::uint8_t> word_bytes(std::span<const std::int16_t> words);

} // namespace tcdnpe::npesim
