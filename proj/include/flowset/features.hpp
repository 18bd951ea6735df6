#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "flowset/packet.hpp"

namespace flowset {

/// Inter-arrival summary of one direction, milliseconds.
struct InterPacketStats {
    double mean_ms = 0;
    double max_ms = 0;
    double min_ms = 0;
};

/// Gaps between consecutive timestamps. Fewer than two timestamps give
/// all zeros. `timestamps` must be sorted.
InterPacketStats interpkt_stats(std::span<const Micros> timestamps);

/// Mean absolute difference of successive inter-arrival gaps, in ms.
/// Zero for fewer than three timestamps.
double jitter_ms(std::span<const Micros> timestamps);

/// 8 * bytes / seconds; durations below one microsecond report 0.
double load_bps(std::uint64_t bytes, double seconds);

struct SetupTimes {
    double syn_ack_ms = 0;
    double ack_dat_ms = 0;
    double tcp_rtt_ms = 0;
    bool out_of_order = false;  // stages present but not ordered syn <= synack <= ack
};

/// Connection setup timing. Any missing stage, or misordered stages,
/// yields zeros.
SetupTimes tcp_setup_times(std::optional<Micros> syn, std::optional<Micros> synack,
                           std::optional<Micros> ack);

/// Per-direction sequence-space coverage for retransmission detection.
struct SequenceTracker {
    bool has_data = false;
    std::uint32_t max_end = 0;  // highest seq + len seen, serial-number order
};

/// True if the segment's data overlaps sequence space already covered in
/// this direction. The tracker is advanced either way; the caller owns the
/// loss counter.
bool detect_retransmission(SequenceTracker& tracker, const PacketRecord& p);

/// Sticky TCP session facts for one flow.
struct TcpSession {
    std::optional<Micros> syn_ts;
    std::optional<Micros> synack_ts;
    std::optional<Micros> ack_ts;
    bool syn_seen = false;
    bool synack_seen = false;
    bool established = false;
    bool fin_sent[2] = {false, false};   // [initiator, responder]
    bool fin_acked[2] = {false, false};  // peer acknowledged the FIN
    bool rst_seen = false;

    bool fin_complete() const { return fin_acked[0] && fin_acked[1]; }
};

enum class StateCode : std::uint8_t { Int, Req, Con, Fin, Rst };

std::string_view state_name(StateCode s);
std::optional<StateCode> parse_state(std::string_view text);

/// Transaction state. For non-TCP flows only the per-direction packet
/// presence matters.
StateCode transaction_state(const TcpSession& session, Protocol proto, bool initiator_sent,
                            bool responder_sent);

struct ActiveStats {
    double mean_ms = 0;
    double stddev_ms = 0;
    double max_ms = 0;
    double min_ms = 0;
};

/// Splits a sorted timestamp list into runs whose internal gaps are below
/// `idle_threshold`; returns mean, population standard deviation, max and
/// min of run durations.
ActiveStats active_idle_stats(std::span<const Micros> timestamps, Micros idle_threshold);

/// Full per-record feature vector; also the emitted flow record.
struct FeatureVector {
    std::uint64_t flow_id = 0;
    std::uint64_t rank = 0;
    Micros start_time = 0;
    Micros last_time = 0;
    double dur = 0;  // seconds
    IpAddress src_addr;
    IpAddress dst_addr;
    std::uint16_t sport = 0;
    std::uint16_t dport = 0;
    Protocol proto;
    StateCode state = StateCode::Int;
    std::uint64_t src_pkts = 0;
    std::uint64_t dst_pkts = 0;
    std::uint64_t src_bytes = 0;
    std::uint64_t dst_bytes = 0;
    double src_load = 0;  // bits/s
    double dst_load = 0;
    double s_mean_pkt_sz = 0;
    double d_mean_pkt_sz = 0;
    InterPacketStats s_int_pkt;
    InterPacketStats d_int_pkt;
    double src_jitter = 0;  // ms
    double dst_jitter = 0;
    std::uint8_t s_ttl = 0;
    std::uint8_t d_ttl = 0;
    std::uint64_t src_loss = 0;
    std::uint64_t dst_loss = 0;
    std::uint16_t src_win = 0;
    std::uint16_t dst_win = 0;
    std::uint32_t src_tcp_base = 0;
    std::uint32_t dst_tcp_base = 0;
    double syn_ack = 0;  // ms
    double ack_dat = 0;
    double tcp_rtt = 0;
    ActiveStats active;
    std::string gt_label;
};

using FlowRecord = FeatureVector;

}  // namespace flowset
