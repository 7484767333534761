#include "spn/kernels.hpp"

#include <algorithm>

namespace spn::kernels::scalar {

double sum(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc;
}

double sum_reciprocal(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += 1.0 / v;
    return acc;
}

double sum_squared_deviation(std::span<const double> x, double center) {
    double acc = 0.0;
    for (double v : x) {
        const double d = v - center;
        acc += d * d;
    }
    return acc;
}

void relax_min_plus(std::span<double> dist, double base, std::span<const double> length) {
    const std::size_t n = std::min(dist.size(), length.size());
    for (std::size_t v = 0; v < n; ++v) {
        const double candidate = base + length[v];
        if (candidate < dist[v]) dist[v] = candidate;
    }
}

}  // namespace spn::kernels::scalar
