// Compiled with -mavx2; only called after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>
#include <cstdlib>

#include "flowset/kernels.hpp"

namespace flowset::kernels {

namespace {

inline __m256i load(const Micros* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); }

inline __m256i max64(__m256i a, __m256i b) { return _mm256_blendv_epi8(b, a, _mm256_cmpgt_epi64(a, b)); }
inline __m256i min64(__m256i a, __m256i b) { return _mm256_blendv_epi8(a, b, _mm256_cmpgt_epi64(a, b)); }

inline __m256i abs64(__m256i v) {
    const __m256i sign = _mm256_cmpgt_epi64(_mm256_setzero_si256(), v);
    return _mm256_sub_epi64(_mm256_xor_si256(v, sign), sign);
}

inline void store(std::int64_t out[4], __m256i v) { _mm256_storeu_si256(reinterpret_cast<__m256i*>(out), v); }

}  // namespace

GapSummary gap_summary_avx2(std::span<const Micros> ts) {
    GapSummary s;
    const std::size_t n = ts.size();
    if (n < 2) return s;
    const Micros* t = ts.data();
    s.gap_count = static_cast<std::int64_t>(n - 1);
    s.gap_sum = t[n - 1] - t[0];

    // gaps g[i] = t[i+1] - t[i], i < n-1
    const std::size_t gaps = n - 1;
    std::int64_t gmax = t[1] - t[0];
    std::int64_t gmin = gmax;
    std::size_t i = 0;
    if (gaps >= 4) {
        __m256i vmax = _mm256_set1_epi64x(gmax);
        __m256i vmin = vmax;
        for (; i + 4 <= gaps; i += 4) {
            const __m256i g = _mm256_sub_epi64(load(t + i + 1), load(t + i));
            vmax = max64(vmax, g);
            vmin = min64(vmin, g);
        }
        std::int64_t lanes_max[4];
        std::int64_t lanes_min[4];
        store(lanes_max, vmax);
        store(lanes_min, vmin);
        gmax = *std::max_element(lanes_max, lanes_max + 4);
        gmin = *std::min_element(lanes_min, lanes_min + 4);
    }
    for (; i < gaps; ++i) {
        const std::int64_t g = t[i + 1] - t[i];
        gmax = std::max(gmax, g);
        gmin = std::min(gmin, g);
    }
    s.gap_max = gmax;
    s.gap_min = gmin;

    // second differences d[i] = t[i+2] - 2 t[i+1] + t[i], i < n-2
    if (n >= 3) {
        const std::size_t deltas = n - 2;
        std::int64_t acc = 0;
        std::size_t j = 0;
        if (deltas >= 4) {
            __m256i vacc = _mm256_setzero_si256();
            for (; j + 4 <= deltas; j += 4) {
                const __m256i a = load(t + j);
                const __m256i b = load(t + j + 1);
                const __m256i c = load(t + j + 2);
                const __m256i d = _mm256_add_epi64(_mm256_sub_epi64(c, _mm256_add_epi64(b, b)), a);
                vacc = _mm256_add_epi64(vacc, abs64(d));
            }
            std::int64_t lanes[4];
            store(lanes, vacc);
            acc = lanes[0] + lanes[1] + lanes[2] + lanes[3];
        }
        for (; j < deltas; ++j) acc += std::abs((t[j + 2] - t[j + 1]) - (t[j + 1] - t[j]));
        s.abs_delta_sum = acc;
    }
    return s;
}

}  // namespace flowset::kernels
