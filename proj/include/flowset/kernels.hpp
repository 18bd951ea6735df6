#pragma once

// Reductions over sorted microsecond timestamp lists. Each kernel has a
// scalar reference implementation and, on x86-64, an AVX2 variant picked at
// runtime. All arithmetic is on 64-bit integers so every variant returns
// bit-identical results.

#include <cstdint>
#include <span>
#include <string_view>

#include "flowset/packet.hpp"

namespace flowset::kernels {

/// Consecutive-gap summary of a sorted timestamp list.
struct GapSummary {
    std::int64_t gap_count = 0;    // n - 1, or 0 when n < 2
    std::int64_t gap_sum = 0;      // sum of gaps
    std::int64_t gap_max = 0;
    std::int64_t gap_min = 0;
    std::int64_t abs_delta_sum = 0;  // sum |g[i+1] - g[i]| over consecutive gaps

    bool operator==(const GapSummary&) const = default;
};

enum class Isa { Scalar, Avx2 };

GapSummary gap_summary_scalar(std::span<const Micros> ts);
#if defined(__x86_64__) || defined(_M_X64)
GapSummary gap_summary_avx2(std::span<const Micros> ts);
#endif

/// Dispatching entry point.
GapSummary gap_summary(std::span<const Micros> ts);

bool isa_supported(Isa isa);
/// Isa currently used by the dispatching entry points.
Isa active_isa();
/// Forces a variant (tests, benchmarking). Returns false, leaving the
/// selection unchanged, if the host does not support it.
bool select_isa(Isa isa);
std::string_view isa_name(Isa isa);

}  // namespace flowset::kernels
