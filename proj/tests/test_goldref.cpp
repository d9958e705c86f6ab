#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <vector>

#include "tcdnpe/error.hpp"
#include "tcdnpe/goldref/goldref.hpp"

using namespace tcdnpe;
using namespace tcdnpe::goldref;

namespace {

Matrix16 matrix(std::size_t r, std::size_t c, std::vector<std::int16_t> data) {
    Matrix16 m(r, c);
    m.data = std::move(data);
    return m;
}

std::string bytes_of(const std::ostringstream& out) { return out.str(); }

} // namespace

TEST_SUITE("exact_dot") {
    TEST_CASE("small hand values") {
        const std::vector<OperandPair> s{{3, 4}, {-5, 6}, {-7, -8}};
        CHECK(exact_dot(s) == 38);
        const std::vector<OperandPair> cancel{{-1, 1}, {1, 1}};
        CHECK(exact_dot(cancel) == 0);
        CHECK(exact_dot(std::span<const OperandPair>{}) == 0);
    }

    TEST_CASE("wraps at 48 bits") {
        // 2^18 products of 2^30 reach exactly 2^48.
        const std::vector<std::int16_t> a(std::size_t{1} << 18, -32768);
        CHECK(exact_dot(a, a) == 0);
        const std::vector<std::int16_t> b(a.size() - 1, -32768);
        CHECK(exact_dot(b, b) == (std::int64_t{1} << 48) - (std::int64_t{1} << 30) - (std::int64_t{1} << 48));
    }

    TEST_CASE("pair form and vector form agree") {
        const Matrix16 x = random_features(1, 500, 7, -32768, 32767);
        const Matrix16 y = random_features(1, 500, 8, -32768, 32767);
        std::vector<OperandPair> pairs;
        for (std::size_t i = 0; i < 500; ++i) {
            pairs.push_back({x.data[i], y.data[i]});
        }
        CHECK(exact_dot(pairs) == exact_dot(x.data, y.data));
    }

    TEST_CASE("length mismatch is rejected") {
        const std::vector<std::int16_t> a(3), b(4);
        CHECK_THROWS_AS(exact_dot(a, b), ConfigError);
    }
}

TEST_SUITE("quantize_relu") {
    TEST_CASE("relu, truncating shift, saturation") {
        CHECK(quantize_relu(0) == 0);
        CHECK(quantize_relu(-5) == 0);
        CHECK(quantize_relu(-(std::int64_t{1} << 40)) == 0);
        CHECK(quantize_relu(255) == 0);
        CHECK(quantize_relu(256) == 1);
        CHECK(quantize_relu(511) == 1);
        CHECK(quantize_relu(std::int64_t{32767} << 8) == 32767);
        CHECK(quantize_relu(std::int64_t{32768} << 8) == 32767);
        CHECK(quantize_relu(12345, QuantConfig{0}) == 12345);
        CHECK(quantize_relu(40000, QuantConfig{0}) == 32767);
    }
}

TEST_SUITE("mlp_forward") {
    TEST_CASE("hand-computed two-layer network") {
        MlpModel m;
        m.layer_sizes = {2, 2, 1};
        m.weights = {matrix(2, 2, {256, -256, 512, 256}), matrix(2, 1, {512, 256})};
        const Matrix16 in = matrix(1, 2, {1, 2});
        // Layer 1: n0 = 1*256 + 2*512 = 1280 -> 5; n1 = -256 + 512 = 256 -> 1.
        // Layer 2: 5*512 + 1*256 = 2816 -> 11.
        const auto out = mlp_forward(m, in);
        REQUIRE(out.size() == 2);
        CHECK(out[0] == matrix(1, 2, {5, 1}));
        CHECK(out[1] == matrix(1, 1, {11}));
    }

    TEST_CASE("zero weights give zero outputs") {
        const std::vector<int> sizes{5, 4, 3};
        MlpModel m = random_model(sizes, 1);
        for (auto& w : m.weights) {
            std::fill(w.data.begin(), w.data.end(), 0);
        }
        const auto out = mlp_forward(m, random_features(3, 5, 2));
        for (const auto& o : out) {
            CHECK(std::all_of(o.data.begin(), o.data.end(), [](std::int16_t v) { return v == 0; }));
        }
    }

    TEST_CASE("batches are independent") {
        const std::vector<int> sizes{6, 5, 2};
        const MlpModel m = random_model(sizes, 3);
        const Matrix16 in = random_features(4, 6, 4);
        const auto all = mlp_forward(m, in);
        for (std::size_t b = 0; b < 4; ++b) {
            Matrix16 one(1, 6);
            std::copy_n(in.row(b).begin(), 6, one.row(0).begin());
            const auto single = mlp_forward(m, one);
            CHECK(std::equal(single[1].row(0).begin(), single[1].row(0).end(), all[1].row(b).begin()));
        }
    }

    TEST_CASE("input width is checked") {
        const std::vector<int> sizes{3, 2};
        CHECK_THROWS_AS(mlp_forward(random_model(sizes, 1), random_features(1, 4, 1)), ConfigError);
    }
}

TEST_SUITE("random data") {
    TEST_CASE("seeded, deterministic and in range") {
        const std::vector<int> sizes{10, 20, 5};
        CHECK(random_model(sizes, 9).weights == random_model(sizes, 9).weights);
        CHECK_FALSE(random_model(sizes, 9).weights == random_model(sizes, 10).weights);
        for (const auto& w : random_model(sizes, 9).weights) {
            for (std::int16_t v : w.data) {
                REQUIRE(v >= -256);
                REQUIRE(v <= 255);
            }
        }
        const Matrix16 f = random_features(3, 50, 1);
        for (std::int16_t v : f.data) {
            REQUIRE(v >= 0);
            REQUIRE(v <= 511);
        }
    }
}

TEST_SUITE("wire format") {
    TEST_CASE("byte layout of one record") {
        MlpModel m;
        m.layer_sizes = {1, 2};
        m.weights = {matrix(1, 2, {1, -2})};
        std::ostringstream out;
        write_model(out, m);
        const std::string expected("TCDW\x01\x00\x00\x00\x01\x00\x00\x00\x02\x00\x00\x00\x01\x00\xfe\xff", 20);
        CHECK(bytes_of(out) == expected);
    }

    TEST_CASE("model and feature round trips") {
        const std::vector<int> sizes{7, 3, 4, 2};
        const MlpModel m = random_model(sizes, 5, -32768, 32767);
        std::stringstream io;
        write_model(io, m);
        const MlpModel back = read_model(io);
        CHECK(back.layer_sizes == sizes);
        CHECK(back.weights == m.weights);

        const Matrix16 f = random_features(3, 7, 6, -32768, 32767);
        std::stringstream fio;
        write_features(fio, f);
        CHECK(read_features(fio) == f);
    }

    TEST_CASE("malformed inputs are rejected") {
        std::stringstream empty;
        CHECK_THROWS_AS(read_model(empty), FormatError);
        CHECK_THROWS_AS(read_features(empty), FormatError);

        std::stringstream wrong_magic(std::string("TCDF\x01\x00\x00\x00\x01\x00\x00\x00\x01\x00\x00\x00\x05\x00", 18));
        CHECK_THROWS_AS(read_model(wrong_magic), FormatError);

        std::stringstream bad_version(std::string("TCDW\x02\x00\x00\x00\x01\x00\x00\x00\x01\x00\x00\x00\x05\x00", 18));
        CHECK_THROWS_AS(read_model(bad_version), FormatError);

        std::stringstream short_header(std::string("TCDW\x01\x00", 6));
        CHECK_THROWS_AS(read_model(short_header), FormatError);

        std::stringstream short_payload(std::string("TCDW\x01\x00\x00\x00\x02\x00\x00\x00\x01\x00\x00\x00\x05\x00", 18));
        CHECK_THROWS_AS(read_model(short_payload), FormatError);

        // Second layer expects 3 inputs but the first produced 2.
        std::stringstream chained;
        MlpModel a;
        a.layer_sizes = {1, 2};
        a.weights = {matrix(1, 2, {1, 1})};
        MlpModel b;
        b.layer_sizes = {3, 1};
        b.weights = {matrix(3, 1, {1, 1, 1})};
        write_model(chained, a);
        write_model(chained, b);
        CHECK_THROWS_AS(read_model(chained), FormatError);

        CHECK_THROWS_AS(load_model_file("/nonexistent/weights.bin"), FormatError);
    }

    TEST_CASE("validate catches shape disagreements") {
        MlpModel m;
        m.layer_sizes = {2, 3};
        m.weights = {Matrix16(3, 2)};
        CHECK_THROWS_AS(m.validate(), FormatError);
        m.weights.clear();
        CHECK_THROWS_AS(m.validate(), FormatError);
    }
}
