#include "spn/errors.hpp"
#include "spn/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace spn::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(SPN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa detect() noexcept {
    if (const char* force = std::getenv("SPN_FORCE_SCALAR"); force && std::string(force) == "1") {
        return Isa::scalar;
    }
    return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() noexcept {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

bool isa_supported(Isa isa) noexcept {
    return isa == Isa::scalar || (isa == Isa::avx2 && cpu_has_avx2());
}

void set_isa(Isa isa) {
    if (!isa_supported(isa)) {
        throw ValidationError("instruction set not supported on this CPU: " + std::string(isa_name(isa)));
    }
    current().store(isa, std::memory_order_relaxed);
}

#if defined(SPN_HAVE_AVX2)
#define SPN_DISPATCH(fn, ...) \
    (active_isa() == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define SPN_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

double sum(std::span<const double> x) { return SPN_DISPATCH(sum, x); }

double sum_reciprocal(std::span<const double> x) { return SPN_DISPATCH(sum_reciprocal, x); }

double sum_squared_deviation(std::span<const double> x, double center) {
    return SPN_DISPATCH(sum_squared_deviation, x, center);
}

void relax_min_plus(std::span<double> dist, double base, std::span<const double> length) {
    SPN_DISPATCH(relax_min_plus, dist, base, length);
}

#undef SPN_DISPATCH

}  // namespace spn::kernels
