#include "flowset/flow_table.hpp"

#include <algorithm>
#include <cassert>

namespace flowset {

FlowKey FlowKey::from_packet(const PacketRecord& p) {
    return FlowKey{p.proto, p.src_ip, p.src_port, p.dst_ip, p.dst_port};
}

FlowKey FlowKey::reversed() const { return FlowKey{proto, resp_ip, resp_port, init_ip, init_port}; }

std::size_t FlowKeyHash::operator()(const FlowKey& k) const {
    std::size_t h = k.init_ip.hash();
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(k.resp_ip.hash());
    mix(std::size_t{k.init_port} << 16 | k.resp_port);
    mix(k.proto.code);
    return h;
}

FeatureVector finalize_record(const FlowState& fs, const EngineConfig& config) {
    const auto& fwd = fs.window[0];
    const auto& rev = fs.window[1];
    assert(fwd.packets + rev.packets > 0);

    FeatureVector v;
    v.flow_id = fs.flow_id;
    v.rank = fs.rank;
    v.start_time = fs.window_start_ts;
    v.last_time = fs.last_ts;
    v.dur = static_cast<double>(v.last_time - v.start_time) / 1e6;
    v.src_addr = fs.key.init_ip;
    v.dst_addr = fs.key.resp_ip;
    v.sport = fs.key.init_port;
    v.dport = fs.key.resp_port;
    v.proto = fs.key.proto;
    v.state = transaction_state(fs.session, fs.key.proto, fwd.packets > 0, rev.packets > 0);

    v.src_pkts = fwd.packets;
    v.dst_pkts = rev.packets;
    v.src_bytes = fwd.bytes;
    v.dst_bytes = rev.bytes;
    v.src_load = load_bps(fwd.bytes, v.dur);
    v.dst_load = load_bps(rev.bytes, v.dur);
    v.s_mean_pkt_sz = fwd.packets ? static_cast<double>(fwd.bytes) / static_cast<double>(fwd.packets) : 0.0;
    v.d_mean_pkt_sz = rev.packets ? static_cast<double>(rev.bytes) / static_cast<double>(rev.packets) : 0.0;
    v.s_int_pkt = interpkt_stats(fwd.timestamps);
    v.d_int_pkt = interpkt_stats(rev.timestamps);
    v.src_jitter = jitter_ms(fwd.timestamps);
    v.dst_jitter = jitter_ms(rev.timestamps);

    v.s_ttl = fs.sticky[0].ttl.value_or(0);
    v.d_ttl = fs.sticky[1].ttl.value_or(0);
    v.src_loss = fwd.losses;
    v.dst_loss = rev.losses;
    v.src_win = fs.sticky[0].tcp_window.value_or(0);
    v.dst_win = fs.sticky[1].tcp_window.value_or(0);
    v.src_tcp_base = fs.sticky[0].tcp_base.value_or(0);
    v.dst_tcp_base = fs.sticky[1].tcp_base.value_or(0);

    const auto setup = tcp_setup_times(fs.session.syn_ts, fs.session.synack_ts, fs.session.ack_ts);
    v.syn_ack = setup.syn_ack_ms;
    v.ack_dat = setup.ack_dat_ms;
    v.tcp_rtt = setup.tcp_rtt_ms;

    std::vector<Micros> merged;
    merged.reserve(fwd.timestamps.size() + rev.timestamps.size());
    std::merge(fwd.timestamps.begin(), fwd.timestamps.end(), rev.timestamps.begin(), rev.timestamps.end(),
               std::back_inserter(merged));
    v.active = active_idle_stats(merged, config.active_threshold);
    return v;
}

FlowTable::FlowTable(EngineConfig config) : config_(config) {}

std::pair<FlowKey, Direction> FlowTable::canonical_key(const PacketRecord& p) const {
    FlowKey key = FlowKey::from_packet(p);
    if (index_.contains(key)) return {key, Direction::Forward};
    FlowKey rev = key.reversed();
    if (index_.contains(rev)) return {rev, Direction::Reverse};
    return {key, Direction::Forward};
}

const FlowState* FlowTable::find(const FlowKey& key) const {
    auto it = index_.find(key);
    return it == index_.end() ? nullptr : &*it->second;
}

FlowRecord FlowTable::emit(const FlowState& fs) {
    ++stats_.records_emitted;
    FlowRecord r = finalize_record(fs, config_);
    if (tcp_setup_times(fs.session.syn_ts, fs.session.synack_ts, fs.session.ack_ts).out_of_order)
        ++stats_.handshake_anomalies;
    return r;
}

void FlowTable::evict_into(Micros now, std::vector<FlowRecord>& out) {
    const auto first = out.size();
    while (!flows_.empty() && now - flows_.front().last_ts >= config_.idle_timeout) {
        out.push_back(emit(flows_.front()));
        index_.erase(flows_.front().key);
        flows_.pop_front();
    }
    std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end(),
              [](const FlowRecord& a, const FlowRecord& b) { return a.flow_id < b.flow_id; });
}

std::vector<FlowRecord> FlowTable::evict_idle(Micros now) {
    std::vector<FlowRecord> out;
    evict_into(now, out);
    return out;
}

std::vector<FlowRecord> FlowTable::close_all(Micros /*final_ts*/) {
    std::vector<FlowRecord> out;
    out.reserve(flows_.size());
    for (const auto& fs : flows_) out.push_back(emit(fs));
    flows_.clear();
    index_.clear();
    std::sort(out.begin(), out.end(), [](const FlowRecord& a, const FlowRecord& b) { return a.flow_id < b.flow_id; });
    return out;
}

void FlowTable::update(FlowState& fs, Direction dir, const PacketRecord& p, Micros ts) {
    const int d = static_cast<int>(dir);
    auto& w = fs.window[d];
    auto& sticky = fs.sticky[d];
    w.timestamps.push_back(ts);
    ++w.packets;
    w.bytes += p.ip_bytes;
    if (!sticky.ttl) sticky.ttl = p.ttl;

    if (!p.tcp) return;
    const TcpInfo& tcp = *p.tcp;
    if (!sticky.tcp_window) sticky.tcp_window = tcp.window;
    if (!sticky.tcp_base) sticky.tcp_base = tcp.seq;
    if (detect_retransmission(sticky.sequence, p)) ++w.losses;

    auto& s = fs.session;
    const auto& f = tcp.flags;
    const bool forward = dir == Direction::Forward;
    if (forward && f.syn && !f.ack && !s.syn_ts) {
        s.syn_ts = ts;
        s.syn_seen = true;
    } else if (!forward && f.syn && f.ack && s.syn_ts && !s.synack_ts) {
        s.synack_ts = ts;
        s.synack_seen = true;
    } else if (forward && f.ack && !f.syn && s.synack_ts && !s.ack_ts) {
        s.ack_ts = ts;
        s.established = true;
    }

    const int peer = 1 - d;
    if (f.ack && s.fin_sent[peer]) s.fin_acked[peer] = true;
    if (f.fin) s.fin_sent[d] = true;
    if (f.rst) s.rst_seen = true;
}

std::vector<FlowRecord> FlowTable::ingest(const PacketRecord& p) {
    Micros ts = p.ts;
    if (max_ts_ && ts < *max_ts_) {
        if (*max_ts_ - ts > config_.reorder_tolerance) ++stats_.timestamp_anomalies;
        ts = *max_ts_;
    } else {
        max_ts_ = ts;
    }

    std::vector<FlowRecord> out;
    evict_into(ts, out);

    auto [key, dir] = canonical_key(p);
    auto found = index_.find(key);
    FlowList::iterator it;
    if (found == index_.end()) {
        FlowState fs;
        fs.key = key;
        fs.flow_id = ++next_flow_id_;
        fs.start_ts = fs.last_ts = fs.window_start_ts = ts;
        flows_.push_back(std::move(fs));
        it = std::prev(flows_.end());
        index_.emplace(key, it);
        ++stats_.flows_created;
        stats_.peak_live_flows = std::max<std::uint64_t>(stats_.peak_live_flows, index_.size());
    } else {
        it = found->second;
        flows_.splice(flows_.end(), flows_, it);
        if (ts - it->window_start_ts >= config_.interval) {
            out.push_back(emit(*it));
            ++it->rank;
            it->window[0] = DirectionWindow{};
            it->window[1] = DirectionWindow{};
            it->window_start_ts = ts;
        }
    }

    FlowState& fs = *it;
    update(fs, dir, p, ts);
    fs.last_ts = ts;
    ++stats_.packets_admitted;

    if (fs.session.rst_seen || fs.session.fin_complete()) {
        out.push_back(emit(fs));
        index_.erase(fs.key);
        flows_.erase(it);
    }

    std::stable_sort(out.begin(), out.end(), [](const FlowRecord& a, const FlowRecord& b) {
        return a.start_time != b.start_time ? a.start_time < b.start_time : a.flow_id < b.flow_id;
    });
    return out;
}

}  // namespace flowset
