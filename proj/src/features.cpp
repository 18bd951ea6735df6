#include "flowset/features.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <vector>

#include "flowset/kernels.hpp"

namespace flowset {

InterPacketStats interpkt_stats(std::span<const Micros> timestamps) {
    assert(std::is_sorted(timestamps.begin(), timestamps.end()));
    const auto g = kernels::gap_summary(timestamps);
    if (g.gap_count == 0) return {};
    return {static_cast<double>(g.gap_sum) / static_cast<double>(g.gap_count) / 1000.0,
            static_cast<double>(g.gap_max) / 1000.0, static_cast<double>(g.gap_min) / 1000.0};
}

double jitter_ms(std::span<const Micros> timestamps) {
    assert(std::is_sorted(timestamps.begin(), timestamps.end()));
    if (timestamps.size() < 3) return 0;
    const auto g = kernels::gap_summary(timestamps);
    return static_cast<double>(g.abs_delta_sum) / static_cast<double>(timestamps.size() - 2) / 1000.0;
}

double load_bps(std::uint64_t bytes, double seconds) {
    if (seconds < 1e-6) return 0;
    return 8.0 * static_cast<double>(bytes) / seconds;
}

SetupTimes tcp_setup_times(std::optional<Micros> syn, std::optional<Micros> synack, std::optional<Micros> ack) {
    SetupTimes t;
    if (!syn || !synack || !ack) return t;
    if (*syn > *synack || *synack > *ack) {
        t.out_of_order = true;
        return t;
    }
    t.syn_ack_ms = static_cast<double>(*synack - *syn) / 1000.0;
    t.ack_dat_ms = static_cast<double>(*ack - *synack) / 1000.0;
    t.tcp_rtt_ms = t.syn_ack_ms + t.ack_dat_ms;
    return t;
}

bool detect_retransmission(SequenceTracker& tracker, const PacketRecord& p) {
    if (!p.tcp || p.payload_len == 0) return false;
    const std::uint32_t begin = p.tcp->seq;
    const std::uint32_t end = begin + p.payload_len;
    bool overlap = false;
    if (!tracker.has_data) {
        tracker.has_data = true;
        tracker.max_end = end;
        return false;
    }
    // serial-number arithmetic: a < b iff (int32)(a - b) < 0
    overlap = static_cast<std::int32_t>(begin - tracker.max_end) < 0;
    if (static_cast<std::int32_t>(end - tracker.max_end) > 0) tracker.max_end = end;
    return overlap;
}

std::string_view state_name(StateCode s) {
    switch (s) {
        case StateCode::Int:
            return "INT";
        case StateCode::Req:
            return "REQ";
        case StateCode::Con:
            return "CON";
        case StateCode::Fin:
            return "FIN";
        case StateCode::Rst:
            return "RST";
    }
    return "INT";
}

std::optional<StateCode> parse_state(std::string_view text) {
    for (auto s : {StateCode::Int, StateCode::Req, StateCode::Con, StateCode::Fin, StateCode::Rst})
        if (state_name(s) == text) return s;
    return std::nullopt;
}

StateCode transaction_state(const TcpSession& session, Protocol proto, bool initiator_sent, bool responder_sent) {
    if (proto.kind != Proto::Tcp) return initiator_sent && responder_sent ? StateCode::Con : StateCode::Int;
    if (session.rst_seen) return StateCode::Rst;
    if (session.fin_complete()) return StateCode::Fin;
    if (session.established) return StateCode::Con;
    if (session.syn_seen) return StateCode::Req;
    return StateCode::Int;
}

ActiveStats active_idle_stats(std::span<const Micros> timestamps, Micros idle_threshold) {
    assert(std::is_sorted(timestamps.begin(), timestamps.end()));
    if (timestamps.empty()) return {};
    std::vector<double> runs;
    Micros run_start = timestamps.front();
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        if (timestamps[i] - timestamps[i - 1] >= idle_threshold) {
            runs.push_back(static_cast<double>(timestamps[i - 1] - run_start) / 1000.0);
            run_start = timestamps[i];
        }
    }
    runs.push_back(static_cast<double>(timestamps.back() - run_start) / 1000.0);

    ActiveStats s;
    double sum = 0;
    for (double r : runs) sum += r;
    s.mean_ms = sum / static_cast<double>(runs.size());
    double sq = 0;
    for (double r : runs) sq += (r - s.mean_ms) * (r - s.mean_ms);
    s.stddev_ms = std::sqrt(sq / static_cast<double>(runs.size()));
    s.max_ms = *std::max_element(runs.begin(), runs.end());
    s.min_ms = *std::min_element(runs.begin(), runs.end());
    return s;
}

}  // namespace flowset
