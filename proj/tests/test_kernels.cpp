#include <doctest.h>

#include <random>
#include <vector>

#include "tcdnpe/fixed.hpp"
#include "tcdnpe/simd/kernels.hpp"

using namespace tcdnpe;

namespace {

std::vector<std::int16_t> random_words(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<int> word(-32768, 32767);
    std::vector<std::int16_t> v(n);
    for (auto& x : v) {
        x = static_cast<std::int16_t>(word(rng));
    }
    return v;
}

std::int64_t naive_dot(const std::vector<std::int16_t>& a, const std::vector<std::int16_t>& b) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::int64_t{a[i]} * b[i];
    }
    return s;
}

// Restores the dispatch choice when a test overrides it.
struct IsaGuard {
    simd::Isa saved = simd::active_isa();
    ~IsaGuard() { simd::set_active_isa(saved); }
};

} // namespace

TEST_CASE("scalar dot matches a naive loop for every length up to 70") {
    std::mt19937_64 rng(1);
    for (std::size_t n = 0; n <= 70; ++n) {
        const auto a = random_words(rng, n);
        const auto b = random_words(rng, n);
        CHECK(simd::scalar::dot_i16(a, b) == naive_dot(a, b));
    }
}

TEST_CASE("dot survives the pairwise overflow of -32768 squared") {
    // Two adjacent (-32768)^2 products sum to 2^31, one past INT32_MAX.
    const std::vector<std::int16_t> a(64, -32768);
    CHECK(simd::scalar::dot_i16(a, a) == std::int64_t{64} << 30);
    CHECK(simd::dot_i16(a, a) == std::int64_t{64} << 30);
#ifdef TCDNPE_HAVE_AVX2_KERNELS
    if (simd::detected_isa() == simd::Isa::Avx2) {
        CHECK(simd::avx2::dot_i16(a, a) == std::int64_t{64} << 30);
    }
#endif
}

#ifdef TCDNPE_HAVE_AVX2_KERNELS
TEST_CASE("avx2 dot equals scalar dot") {
    if (simd::detected_isa() != simd::Isa::Avx2) {
        MESSAGE("CPU lacks AVX2; skipped");
        return;
    }
    std::mt19937_64 rng(2);
    for (std::size_t n : {0, 1, 15, 16, 17, 31, 32, 33, 255, 1024, 1031}) {
        const auto a = random_words(rng, n);
        const auto b = random_words(rng, n);
        CHECK(simd::avx2::dot_i16(a, b) == simd::scalar::dot_i16(a, b));
    }
}

TEST_CASE("avx2 carry-save accumulate equals scalar bit for bit") {
    if (simd::detected_isa() != simd::Isa::Avx2) {
        MESSAGE("CPU lacks AVX2; skipped");
        return;
    }
    std::mt19937_64 rng(3);
    for (std::size_t lanes : {1, 3, 4, 5, 8, 13, 128}) {
        std::vector<std::uint64_t> s1(lanes, 0), c1(lanes, 0), s2(lanes, 0), c2(lanes, 0);
        for (int step = 0; step < 50; ++step) {
            const auto a = random_words(rng, lanes);
            const auto b = random_words(rng, lanes);
            simd::avx2::csa_accumulate(s1, c1, a, b, acc_mask(kAccBits));
            simd::scalar::csa_accumulate(s2, c2, a, b, acc_mask(kAccBits));
        }
        CHECK(s1 == s2);
        CHECK(c1 == c2);
    }
}
#endif

TEST_CASE("carry-save lanes track each lane's dot product") {
    std::mt19937_64 rng(4);
    const std::size_t lanes = 11;
    const std::uint64_t mask = acc_mask(kAccBits);
    std::vector<std::uint64_t> sum(lanes, 0), carry(lanes, 0);
    std::vector<std::int64_t> expect(lanes, 0);
    for (int step = 0; step < 300; ++step) {
        const auto a = random_words(rng, lanes);
        const auto b = random_words(rng, lanes);
        simd::csa_accumulate(sum, carry, a, b, mask);
        for (std::size_t l = 0; l < lanes; ++l) {
            expect[l] += std::int64_t{a[l]} * b[l];
            REQUIRE(((sum[l] + (carry[l] << 1)) & mask) == (static_cast<std::uint64_t>(expect[l]) & mask));
        }
    }
}

TEST_CASE("carry-save accumulate wraps modulo a narrow mask") {
    const std::uint64_t mask = acc_mask(12);
    std::vector<std::uint64_t> sum(1, 0), carry(1, 0);
    const std::vector<std::int16_t> a{100};
    const std::vector<std::int16_t> b{100};
    for (int i = 0; i < 5; ++i) {
        simd::csa_accumulate(sum, carry, a, b, mask);
    }
    CHECK(((sum[0] + (carry[0] << 1)) & mask) == (50000U & mask));
    CHECK((sum[0] & ~mask) == 0);
    CHECK((carry[0] & ~mask) == 0);
}

TEST_CASE("dispatch can be forced to the scalar path") {
    IsaGuard guard;
    simd::set_active_isa(simd::Isa::Scalar);
    CHECK(simd::active_isa() == simd::Isa::Scalar);
    simd::set_active_isa(simd::Isa::Avx2);
    CHECK(simd::active_isa() == simd::detected_isa());
    CHECK(simd::isa_name(simd::Isa::Scalar) == "scalar");
    CHECK(simd::isa_name(simd::Isa::Avx2) == "avx2");
}

TEST_CASE("both dispatch targets agree through the public entry point") {
    IsaGuard guard;
    std::mt19937_64 rng(5);
    const auto a = random_words(rng, 777);
    const auto b = random_words(rng, 777);
    simd::set_active_isa(simd::Isa::Scalar);
    const std::int64_t scalar = simd::dot_i16(a, b);
    simd::set_active_isa(simd::detected_isa());
    CHECK(simd::dot_i16(a, b) == scalar);
    CHECK(scalar == naive_dot(a, b));
}
