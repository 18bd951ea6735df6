#pragma once

#include <cstdint>
#include <functional>
#include <list>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "flowset/features.hpp"
#include "flowset/packet.hpp"

namespace flowset {

struct EngineConfig {
    Micros interval = 60 * kMicrosPerSecond;
    Micros idle_timeout = 60 * kMicrosPerSecond;
    Micros active_threshold = 5 * kMicrosPerSecond;
    Micros reorder_tolerance = 1000;
};

enum class Direction : std::uint8_t { Forward = 0, Reverse = 1 };

/// Bidirectional flow identity; the initiator sent the first packet seen.
struct FlowKey {
    Protocol proto;
    IpAddress init_ip;
    std::uint16_t init_port = 0;
    IpAddress resp_ip;
    std::uint16_t resp_port = 0;

    static FlowKey from_packet(const PacketRecord& p);
    FlowKey reversed() const;
    bool operator==(const FlowKey&) const = default;
};

struct FlowKeyHash {
    std::size_t operator()(const FlowKey& k) const;
};

/// Accumulators of one direction that reset with every record window.
struct DirectionWindow {
    std::vector<Micros> timestamps;
    std::uint64_t packets = 0;
    std::uint64_t bytes = 0;
    std::uint64_t losses = 0;
};

/// Values fixed by the first packet of a direction.
struct DirectionSticky {
    std::optional<std::uint8_t> ttl;
    std::optional<std::uint16_t> tcp_window;
    std::optional<std::uint32_t> tcp_base;
    SequenceTracker sequence;
};

struct FlowState {
    FlowKey key;
    std::uint64_t flow_id = 0;
    std::uint64_t rank = 0;
    Micros start_ts = 0;
    Micros last_ts = 0;
    Micros window_start_ts = 0;
    DirectionWindow window[2];
    DirectionSticky sticky[2];
    TcpSession session;
};

/// Builds the feature vector of the flow's current window. The window must
/// hold at least one packet. GTLabel is left empty.
FeatureVector finalize_record(const FlowState& fs, const EngineConfig& config);

struct EngineStats {
    std::uint64_t packets_admitted = 0;
    std::uint64_t flows_created = 0;
    std::uint64_t records_emitted = 0;
    std::uint64_t timestamp_anomalies = 0;
    std::uint64_t handshake_anomalies = 0;
    std::uint64_t peak_live_flows = 0;
};

/// Streaming bidirectional flow table. Single writer.
class FlowTable {
public:
    explicit FlowTable(EngineConfig config = {});

    /// Key for `p`: the live flow of either orientation, else a new key
    /// with p's source as initiator.
    std::pair<FlowKey, Direction> canonical_key(const PacketRecord& p) const;

    /// Admits one packet. Returns the records this packet caused to be
    /// emitted (idle evictions, window split, termination) sorted by window
    /// start then flow id.
    std::vector<FlowRecord> ingest(const PacketRecord& p);

    /// Finalizes and removes flows with now - last_ts >= idle_timeout,
    /// ordered by flow id.
    std::vector<FlowRecord> evict_idle(Micros now);

    /// End-of-capture flush, ordered by flow id.
    std::vector<FlowRecord> close_all(Micros final_ts);

    std::size_t live_flows() const { return index_.size(); }
    const FlowState* find(const FlowKey& key) const;
    const EngineStats& stats() const { return stats_; }
    const EngineConfig& config() const { return config_; }

private:
    using FlowList = std::list<FlowState>;

    FlowRecord emit(const FlowState& fs);
    void evict_into(Micros now, std::vector<FlowRecord>& out);
    void update(FlowState& fs, Direction dir, const PacketRecord& p, Micros ts);

    EngineConfig config_;
    // least recently active first; packet timestamps are clamped to be
    // monotonic, so this is also ordered by last_ts
    FlowList flows_;
    std::unordered_map<FlowKey, FlowList::iterator, FlowKeyHash> index_;
    std::uint64_t next_flow_id_ = 0;
    std::optional<Micros> max_ts_;
    EngineStats stats_;
};

}  // namespace flowset
