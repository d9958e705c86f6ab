#include "tcdnpe/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace tcdnpe::simd {

namespace {

bool cpu_has_avx2() {
#if defined(TCDNPE_HAVE_AVX2_KERNELS)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa initial_isa() {
    if (const char* env = std::getenv("TCDNPE_SIMD"); env != nullptr && std::string_view(env) == "scalar") {
        return Isa::Scalar;
    }
    return detected_isa();
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

} // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    }
    return "?";
}

Isa detected_isa() { return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    if (isa == Isa::Avx2 && !cpu_has_avx2()) {
        isa = Isa::Scalar;
    }
    current().store(isa, std::memory_order_relaxed);
}

std::int64_t dot_i16(std::span<const std::int16_t> a, std::span<const std::int16_t> b) {
#if defined(TCDNPE_HAVE_AVX2_KERNELS)
    if (active_isa() == Isa::Avx2) {
        return avx2::dot_i16(a, b);
    }
#endif
    return scalar::dot_i16(a, b);
}

void csa_accumulate(std::span<std::uint64_t> sum, std::span<std::uint64_t> carry,
                    std::span<const std::int16_t> a, std::span<const std::int16_t> b,
                    std::uint64_t mask) {
#if defined(TCDNPE_HAVE_AVX2_KERNELS)
    if (active_isa() == Isa::Avx2) {
        avx2::csa_accumulate(sum, carry, a, b, mask);
        return;
    }
#endif
    scalar::csa_accumulate(sum, carry, a, b, mask);
}

} // namespace tcdnpe::simd
