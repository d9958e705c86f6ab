#include "tcdnpe/npesim/rlc.hpp"

#include <string>

#include "tcdnpe/error.hpp"

namespace tcdnpe::npesim {

std::vector<std::uint8_t> rlc_encode(std::span<const std::uint8_t> bytes) {
    std::vector<std::uint8_t> out;
    std::size_t i = 0;
    while (i < bytes.size()) {
        const std::uint8_t v = bytes[i];
        std::size_t run = 1;
        while (i + run < bytes.size() && bytes[i + run] == v && run < 255) {
            ++run;
        }
        out.push_back(v);
        out.push_back(static_cast<std::uint8_t>(run));
        i += run;
    }
    return out;
}

std::vector<std::uint8_t> rlc_decode(std::span<const std::uint8_t> encoded) {
    if (encoded.size() % 2 != 0) {
        throw FormatError("RLC stream has odd length " + std::to_string(encoded.size()));
    }
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < encoded.size(); i += 2) {
        const std::uint8_t run = encoded[i + 1];
        if (run == 0) {
            throw FormatError("RLC stream has a zero-length run at byte " + std::to_string(i + 1));
        }
        out.insert(out.end(), run, encoded[i]);
    }
    return out;
}

std::vector<std::uint8_t> word_bytes(std::span<const std::int16_t> words) {
    std::vector<std::uint8_t> out;
    out.reserve(words.size() * 2);
    for (std::int16_t w : words) {
        const auto u = static_cast<std::uint16_t>(w);
        out.push_back(static_cast<std::uint8_t>(u & 0xFF));
        out.push_back(static_cast<std::uint8_t>(u >> 8));
    }
    return out;
}

} // namespace tcdnpe::npesim
