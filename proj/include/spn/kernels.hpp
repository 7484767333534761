#pragma once

// Dense inner loops shared by the graph and statistics code.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 variant. The variant is chosen once at startup from
// the CPU feature flags; set SPN_FORCE_SCALAR=1 in the environment, or call
// set_isa(), to pin the scalar path. Reductions in the vector path use a
// different summation order and agree with the reference to a few ulps;
// relax_min_plus is bit-identical across variants.

#include <cstddef>
#include <span>
#include <string_view>

namespace spn::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// Instruction set used by the dispatching entry points below.
Isa active_isa() noexcept;

/// True when `isa` can run on this machine.
bool isa_supported(Isa isa) noexcept;

/// Pins the dispatch to `isa`. Throws ValidationError when unsupported.
void set_isa(Isa isa);

double sum(std::span<const double> x);

/// Sum of 1/x[i]. Infinite entries contribute exactly 0.
double sum_reciprocal(std::span<const double> x);

/// Sum of (x[i] - center)^2.
double sum_squared_deviation(std::span<const double> x, double center);

/// dist[v] = min(dist[v], base + length[v]) for every v.
void relax_min_plus(std::span<double> dist, double base, std::span<const double> length);

namespace scalar {
double sum(std::span<const double> x);
double sum_reciprocal(std::span<const double> x);
double sum_squared_deviation(std::span<const double> x, double center);
void relax_min_plus(std::span<double> dist, double base, std::span<const double> length);
}  // namespace scalar

namespace avx2 {
double sum(std::span<const double> x);
double sum_reciprocal(std::span<const double> x);
double sum_squared_deviation(std::span<const double> x, double center);
void relax_min_plus(std::span<double> dist, double base, std::span<const double> length);
}  // namespace avx2

}  // namespace spn::kernels
