#include <atomic>

#include "flowset/kernels.hpp"

namespace flowset::kernels {

namespace {

using GapFn = GapSummary (*)(std::span<const Micros>);

bool host_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa detect() { return host_has_avx2() ? Isa::Avx2 : Isa::Scalar; }

GapFn resolve(Isa isa) {
#if defined(__x86_64__) || defined(_M_X64)
    if (isa == Isa::Avx2) return &gap_summary_avx2;
#endif
    (void)isa;
    return &gap_summary_scalar;
}

struct Selection {
    std::atomic<Isa> isa;
    std::atomic<GapFn> gap;

    Selection() : isa(detect()), gap(resolve(isa.load())) {}
};

Selection& selection() {
    static Selection s;
    return s;
}

}  // namespace

bool isa_supported(Isa isa) { return isa == Isa::Scalar || (isa == Isa::Avx2 && host_has_avx2()); }

Isa active_isa() { return selection().isa.load(std::memory_order_relaxed); }

bool select_isa(Isa isa) {
    if (!isa_supported(isa)) return false;
    auto& s = selection();
    s.isa.store(isa, std::memory_order_relaxed);
    s.gap.store(resolve(isa), std::memory_order_relaxed);
    return true;
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

GapSummary gap_summary(std::span<const Micros> ts) {
    return selection().gap.load(std::memory_order_relaxed)(ts);
}

}  // namespace flowset::kernels
