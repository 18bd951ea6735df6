#include <algorithm>
#include <cstdlib>

#include "flowset/kernels.hpp"

namespace flowset::kernels {

GapSummary gap_summary_scalar(std::span<const Micros> ts) {
    GapSummary s;
    if (ts.size() < 2) return s;
    s.gap_count = static_cast<std::int64_t>(ts.size() - 1);
    s.gap_sum = ts.back() - ts.front();
    s.gap_max = ts[1] - ts[0];
    s.gap_min = s.gap_max;
    std::int64_t prev = s.gap_max;
    for (std::size_t i = 2; i < ts.size(); ++i) {
        const std::int64_t g = ts[i] - ts[i - 1];
        s.gap_max = std::max(s.gap_max, g);
        s.gap_min = std::min(s.gap_min, g);
        s.abs_delta_sum += std::abs(g - prev);
        prev = g;
    }
    return s;
}

}  // namespace flowset::kernels
