#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "flowset/kernels.hpp"

using namespace flowset;
using namespace flowset::kernels;

namespace {

// Straight-line reference kept apart from the library's scalar kernel.
GapSummary reference(const std::vector<Micros>& ts) {
    GapSummary g;
    if (ts.size() < 2) return g;
    std::vector<std::int64_t> gaps;
    for (std::size_t i = 1; i < ts.size(); ++i) gaps.push_back(ts[i] - ts[i - 1]);
    g.gap_count = static_cast<std::int64_t>(gaps.size());
    for (auto x : gaps) g.gap_sum += x;
    g.gap_max = *std::max_element(gaps.begin(), gaps.end());
    g.gap_min = *std::min_element(gaps.begin(), gaps.end());
    for (std::size_t i = 1; i < gaps.size(); ++i) g.abs_delta_sum += std::llabs(gaps[i] - gaps[i - 1]);
    return g;
}

std::vector<Micros> random_sorted(std::mt19937_64& rng, std::size_t n, Micros max_gap) {
    std::vector<Micros> ts(n);
    Micros t = static_cast<Micros>(rng() % (1LL << 52));
    for (auto& x : ts) {
        t += static_cast<Micros>(rng() % static_cast<std::uint64_t>(max_gap + 1));
        x = t;
    }
    return ts;
}

}  // namespace

TEST(Kernels, KnownValues) {
    const std::vector<Micros> ts{0, 1000, 3000, 3500};
    const auto g = gap_summary_scalar(ts);
    EXPECT_EQ(g.gap_count, 3);
    EXPECT_EQ(g.gap_sum, 3500);
    EXPECT_EQ(g.gap_max, 2000);
    EXPECT_EQ(g.gap_min, 500);
    EXPECT_EQ(g.abs_delta_sum, 1000 + 1500);
    EXPECT_EQ(gap_summary_scalar(std::vector<Micros>{5}), GapSummary{});
    EXPECT_EQ(gap_summary_scalar(std::vector<Micros>{}), GapSummary{});
}

TEST(Kernels, ScalarMatchesReference) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 500; ++i) {
        const auto ts = random_sorted(rng, rng() % 200, i % 2 ? 10 : 5'000'000'000LL);
        ASSERT_EQ(gap_summary_scalar(ts), reference(ts));
    }
}

#if defined(__x86_64__) || defined(_M_X64)
TEST(Kernels, Avx2MatchesScalarExactly) {
    if (!isa_supported(Isa::Avx2)) GTEST_SKIP() << "host has no AVX2";
    std::mt19937_64 rng(2);
    // every length around the vector width, then long random ones
    for (std::size_t n = 0; n < 70; ++n) {
        const auto ts = random_sorted(rng, n, 1000);
        ASSERT_EQ(gap_summary_avx2(ts), gap_summary_scalar(ts)) << "n=" << n;
    }
    for (int i = 0; i < 2000; ++i) {
        const auto ts = random_sorted(rng, rng() % 3000, i % 3 == 0 ? 0 : 1LL << (rng() % 40));
        ASSERT_EQ(gap_summary_avx2(ts), gap_summary_scalar(ts));
    }
    // gaps large enough to need the full 64-bit compare
    std::vector<Micros> wide{0, 1LL << 40, (1LL << 40) + 1, 1LL << 50, (1LL << 50) + (1LL << 33), 1LL << 61};
    EXPECT_EQ(gap_summary_avx2(wide), gap_summary_scalar(wide));
}
#endif

TEST(Kernels, DispatchSelection) {
    const Isa original = active_isa();
    EXPECT_TRUE(select_isa(Isa::Scalar));
    EXPECT_EQ(active_isa(), Isa::Scalar);
    const std::vector<Micros> ts{1, 4, 9, 16, 25, 36, 49, 64, 81};
    const auto scalar = gap_summary(ts);
    if (select_isa(Isa::Avx2)) {
        EXPECT_EQ(active_isa(), Isa::Avx2);
        EXPECT_EQ(gap_summary(ts), scalar);
    } else {
        EXPECT_EQ(active_isa(), Isa::Scalar);
    }
    select_isa(original);
    EXPECT_EQ(isa_name(Isa::Scalar), "scalar");
}
