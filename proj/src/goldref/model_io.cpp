#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "tcdnpe/error.hpp"
#include "tcdnpe/goldref/goldref.hpp"

namespace tcdnpe::goldref {

namespace {

constexpr std::array<char, 4> kWeightMagic{'T', 'C', 'D', 'W'};
constexpr std::array<char, 4> kFeatureMagic{'T', 'C', 'D', 'F'};

void put_u32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                           static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    out.write(bytes, 4);
}

std::uint32_t get_u32(const unsigned char* p) {
    return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
           (std::uint32_t{p[3]} << 24);
}

void write_record(std::ostream& out, const std::array<char, 4>& magic, const Matrix16& m) {
    out.write(magic.data(), 4);
    put_u32(out, kWireVersion);
    put_u32(out, static_cast<std::uint32_t>(m.rows));
    put_u32(out, static_cast<std::uint32_t>(m.cols));
    for (std::int16_t v : m.data) {
        const auto u = static_cast<std::uint16_t>(v);
        const char bytes[2] = {static_cast<char>(u & 0xFF), static_cast<char>(u >> 8)};
        out.write(bytes, 2);
    }
}

// Returns false on clean end of stream before a header.
bool read_record(std::istream& in, const std::array<char, 4>& magic, Matrix16& m) {
    unsigned char header[16];
    in.read(reinterpret_cast<char*>(header), sizeof header);
    if (in.gcount() == 0) {
        return false;
    }
    if (in.gcount() != sizeof header) {
        throw FormatError("truncated record header");
    }
    if (std::memcmp(header, magic.data(), 4) != 0) {
        throw FormatError(std::string("bad magic, expected ") + std::string(magic.data(), 4));
    }
    if (const std::uint32_t version = get_u32(header + 4); version != kWireVersion) {
        throw FormatError("unsupported record version " + std::to_string(version));
    }
    const std::uint32_t rows = get_u32(header + 8);
    const std::uint32_t cols = get_u32(header + 12);
    if (rows == 0 || cols == 0) {
        throw FormatError("record with empty dimension");
    }
    m = Matrix16(rows, cols);
    std::vector<unsigned char> raw(m.data.size() * 2);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
        throw FormatError("truncated record payload");
    }
    for (std::size_t i = 0; i < m.data.size(); ++i) {
        m.data[i] = static_cast<std::int16_t>(static_cast<std::uint16_t>(raw[2 * i] | (raw[2 * i + 1] << 8)));
    }
    return true;
}

} // namespace

void write_model(std::ostream& out, const MlpModel& model) {
    model.validate();
    for (const Matrix16& w : model.weights) {
        write_record(out, kWeightMagic, w);
    }
}

MlpModel read_model(std::istream& in) {
    MlpModel model;
    Matrix16 w;
    while (read_record(in, kWeightMagic, w)) {
        if (model.layer_sizes.empty()) {
            model.layer_sizes.push_back(static_cast<int>(w.rows));
        } else if (static_cast<int>(w.rows) != model.layer_sizes.back()) {
            throw FormatError("layer " + std::to_string(model.weights.size()) + " has " + std::to_string(w.rows) +
                              " inputs, previous layer has " + std::to_string(model.layer_sizes.back()) +
                              " neurons");
        }
        model.layer_sizes.push_back(static_cast<int>(w.cols));
        model.weights.push_back(std::move(w));
    }
    model.validate();
    return model;
}

void write_features(std::ostream& out, const Matrix16& features) { write_record(out, kFeatureMagic, features); }

Matrix16 read_features(std::istream& in) {
    Matrix16 f;
    if (!read_record(in, kFeatureMagic, f)) {
        throw FormatError("empty feature file");
    }
    return f;
}

MlpModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open weight file " + path);
    }
    return read_model(in);
}

Matrix16 load_features_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open feature file " + path);
    }
    return read_features(in);
}

} // namespace tcdnpe::goldref
