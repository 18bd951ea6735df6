#include "random_capture.hpp"

#include <string>

namespace flowset::testing {

namespace {

struct Tuple {
    std::string a, b;
    std::uint8_t proto = 6;
    std::uint16_t pa = 0, pb = 0;
    std::uint8_t ttl[2] = {64, 64};
    std::uint16_t window[2] = {1024, 1024};
    std::uint32_t seq[2] = {0, 0};
};

std::string v4(std::mt19937_64& rng) {
    return "10.0." + std::to_string(rng() % 4) + "." + std::to_string(1 + rng() % 6);
}

std::string v6(std::mt19937_64& rng) { return "2001:db8::" + std::to_string(1 + rng() % 6); }

}  // namespace

std::vector<FrameSpec> random_capture(std::mt19937_64& rng, const RandomCaptureOptions& opt) {
    auto pick = [&](std::uint64_t n) { return rng() % n; };
    const int n_tuples = 1 + static_cast<int>(pick(static_cast<std::uint64_t>(opt.max_tuples)));
    const int n_packets = 1 + static_cast<int>(pick(static_cast<std::uint64_t>(opt.max_packets)));

    std::vector<Tuple> tuples(static_cast<std::size_t>(n_tuples));
    for (auto& t : tuples) {
        const bool six = opt.with_ipv6 && pick(6) == 0;
        t.a = six ? v6(rng) : v4(rng);
        t.b = six ? v6(rng) : v4(rng);
        static constexpr std::uint8_t kProtos[] = {6, 6, 6, 17, 17, 1, 47};
        t.proto = kProtos[pick(7)];
        if (t.proto == 1 && six) t.proto = 58;
        if (t.proto == 6 || t.proto == 17) {
            t.pa = static_cast<std::uint16_t>(1024 + pick(4));
            t.pb = static_cast<std::uint16_t>(pick(2) ? 80 : 53);
        }
        for (int d = 0; d < 2; ++d) {
            t.ttl[d] = static_cast<std::uint8_t>(1 + pick(255));
            t.window[d] = static_cast<std::uint16_t>(pick(65536));
            // some directions start just below the 32-bit wrap
            t.seq[d] = pick(4) == 0 ? 0xFFFFFFFFu - static_cast<std::uint32_t>(pick(3000))
                                    : static_cast<std::uint32_t>(rng());
        }
    }

    std::vector<FrameSpec> out;
    out.reserve(static_cast<std::size_t>(n_packets));
    Micros ts = 1'500'000'000LL * kMicrosPerSecond + static_cast<Micros>(pick(1'000'000'000));
    for (int i = 0; i < n_packets; ++i) {
        // mostly short gaps, sometimes gaps that cross interval or idle limits
        const auto r = pick(100);
        if (r < 60) ts += static_cast<Micros>(pick(20'000));
        else if (r < 90) ts += static_cast<Micros>(pick(3'000'000));
        else if (r < 98) ts += static_cast<Micros>(pick(20'000'000));
        else ts += static_cast<Micros>(pick(90'000'000));
        Micros stamp = ts;
        if (opt.with_regressions && pick(40) == 0) stamp -= static_cast<Micros>(pick(3000));

        auto& t = tuples[pick(tuples.size())];
        const int d = pick(10) < 6 ? 0 : 1;
        FrameSpec f;
        f.ts = stamp;
        f.src = d == 0 ? t.a : t.b;
        f.dst = d == 0 ? t.b : t.a;
        f.sport = d == 0 ? t.pa : t.pb;
        f.dport = d == 0 ? t.pb : t.pa;
        f.proto = t.proto;
        f.ttl = pick(20) == 0 ? static_cast<std::uint8_t>(pick(256)) : t.ttl[d];
        f.vlan_tags = pick(10) == 0 ? 1 : 0;
        if (t.proto == 6) {
            f.window = pick(5) == 0 ? static_cast<std::uint16_t>(pick(65536)) : t.window[d];
            const auto k = pick(100);
            if (k < 12) f.tcp_flags = kSyn;
            else if (k < 22) f.tcp_flags = kSyn | kAck;
            else if (k < 55) f.tcp_flags = kAck;
            else if (k < 85) f.tcp_flags = kPsh | kAck;
            else if (k < 96) f.tcp_flags = kFin | kAck;
            else f.tcp_flags = kRst;
            if (f.tcp_flags == (kPsh | kAck)) f.payload = 1 + static_cast<std::uint32_t>(pick(1400));
            if (pick(8) == 0 && t.seq[d] > 600) {
                // duplicate or overlapping segment
                f.seq = t.seq[d] - static_cast<std::uint32_t>(pick(600));
                if (f.payload == 0) f.payload = 1 + static_cast<std::uint32_t>(pick(300));
            } else {
                f.seq = t.seq[d];
                t.seq[d] += f.payload;
            }
        } else {
            f.payload = static_cast<std::uint32_t>(pick(1200));
        }
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<CapturedFrame> to_frames(std::mt19937_64& rng, const std::vector<FrameSpec>& specs, bool noise) {
    std::vector<CapturedFrame> frames;
    frames.reserve(specs.size() + specs.size() / 8);
    for (const auto& s : specs) {
        if (noise && rng() % 25 == 0) frames.push_back({s.ts, build_arp_frame()});
        if (noise && rng() % 40 == 0 && s.src.find(':') == std::string::npos) {
            FrameSpec frag = s;
            frag.frag_offset = static_cast<std::uint16_t>(1 + rng() % 100);
            frames.push_back({s.ts, build_frame(frag)});
        }
        frames.push_back({s.ts, build_frame(s)});
    }
    return frames;
}

}  // namespace flowset::testing
