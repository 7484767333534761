// Compiled with -mavx2; only reached through dispatch when the CPU reports AVX2.
#include "spn/kernels.hpp"

#include <immintrin.h>

#include <algorithm>

namespace spn::kernels::avx2 {
namespace {

inline double horizontal_add(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    const __m128d swapped = _mm_unpackhi_pd(pair, pair);
    return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

}  // namespace

double sum(std::span<const double> x) {
    const double* p = x.data();
    const std::size_t n = x.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(p + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(p + i + 4));
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(p + i));
    double tail = 0.0;
    for (; i < n; ++i) tail += p[i];
    return horizontal_add(_mm256_add_pd(acc0, acc1)) + tail;
}

double sum_reciprocal(std::span<const double> x) {
    const double* p = x.data();
    const std::size_t n = x.size();
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_div_pd(one, _mm256_loadu_pd(p + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_div_pd(one, _mm256_loadu_pd(p + i + 4)));
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_div_pd(one, _mm256_loadu_pd(p + i)));
    double tail = 0.0;
    for (; i < n; ++i) tail += 1.0 / p[i];
    return horizontal_add(_mm256_add_pd(acc0, acc1)) + tail;
}

double sum_squared_deviation(std::span<const double> x, double center) {
    const double* p = x.data();
    const std::size_t n = x.size();
    const __m256d c = _mm256_set1_pd(center);
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(p + i), c);
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(p + i + 4), c);
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(p + i), c);
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d, d));
    }
    double tail = 0.0;
    for (; i < n; ++i) {
        const double d = p[i] - center;
        tail += d * d;
    }
    return horizontal_add(_mm256_add_pd(acc0, acc1)) + tail;
}

void relax_min_plus(std::span<double> dist, double base, std::span<const double> length) {
    double* d = dist.data();
    const double* len = length.data();
    const std::size_t n = std::min(dist.size(), length.size());
    const __m256d b = _mm256_set1_pd(base);
    std::size_t v = 0;
    for (; v + 4 <= n; v += 4) {
        const __m256d candidate = _mm256_add_pd(b, _mm256_loadu_pd(len + v));
        const __m256d current = _mm256_loadu_pd(d + v);
        // Ordered less-than keeps `current` whenever either side is NaN,
        // matching the scalar `if (candidate < current)` branch.
        const __m256d take = _mm256_cmp_pd(candidate, current, _CMP_LT_OQ);
        _mm256_storeu_pd(d + v, _mm256_blendv_pd(current, candidate, take));
    }
    for (; v < n; ++v) {
        const double candidate = base + len[v];
        if (candidate < d[v]) d[v] = candidate;
    }
}

}  // namespace spn::kernels::avx2
