#include "flowset/dataset.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "flowset/csv.hpp"
#include "flowset/timefmt.hpp"

namespace flowset {

namespace {

constexpr std::array<std::string_view, kFieldCount> kNames = {
    "FlowID",     "Rank",       "SrcAddr",    "Sport",      "DstAddr",    "Dport",    "Proto",    "State",
    "Dur",        "SrcBytes",   "DstBytes",   "sTtl",       "dTtl",       "SrcLoss",  "DstLoss",  "SrcLoad",
    "DstLoad",    "SrcPkts",    "DstPkts",    "SrcWin",     "DstWin",     "SrcTCPBase", "DstTCPBase",
    "sMeanPktSz", "dMeanPktSz", "SrcJitter",  "DstJitter",  "SIntPkt",    "SIntPktMax", "SIntPktMin",
    "DIntPkt",    "DIntPktMax", "DIntPktMin", "StartTime",  "LastTime",   "TcpRtt",   "SynAck",   "AckDat",
    "Mean",       "StdDev",     "Max",        "Min",        "GTLabel",
};

constexpr std::array<Field, kFieldCount> make_all() {
    std::array<Field, kFieldCount> a{};
    for (std::size_t i = 0; i < kFieldCount; ++i) a[i] = static_cast<Field>(i);
    return a;
}

constexpr std::array<Field, kFieldCount> kAll = make_all();

std::string valid_names() {
    std::string s;
    for (auto n : kNames) {
        if (!s.empty()) s += ", ";
        s += n;
    }
    return s;
}

std::string f6(double v) { return fmt::format("{:.6f}", v); }

template <typename T>
T parse_uint(Field f, std::string_view text) {
    T v{};
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw DatasetError(fmt::format("invalid {} value '{}'", field_name(f), text));
    return v;
}

double parse_double(Field f, std::string_view text) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    double v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw DatasetError(fmt::format("invalid {} value '{}'", field_name(f), text));
    return v;
}

Micros parse_timestamp(Field f, std::string_view text) {
    auto t = parse_time(text);
    if (!t) throw DatasetError(fmt::format("invalid {} timestamp '{}'", field_name(f), text));
    return t->utc_or_naive;
}

Protocol parse_protocol(std::string_view text) {
    if (text == "tcp") return Protocol::tcp();
    if (text == "udp") return Protocol::udp();
    if (text == "icmp") return Protocol::icmp();
    return Protocol{Proto::Other, parse_uint<std::uint8_t>(Field::Proto, text)};
}

}  // namespace

std::string_view field_name(Field f) { return kNames[static_cast<std::size_t>(f)]; }

std::optional<Field> field_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kFieldCount; ++i)
        if (kNames[i] == name) return static_cast<Field>(i);
    return std::nullopt;
}

std::span<const Field> all_fields() { return kAll; }

bool is_float_field(Field f) {
    switch (f) {
        case Field::Dur:
        case Field::SrcLoad:
        case Field::DstLoad:
        case Field::sMeanPktSz:
        case Field::dMeanPktSz:
        case Field::SrcJitter:
        case Field::DstJitter:
        case Field::SIntPkt:
        case Field::SIntPktMax:
        case Field::SIntPktMin:
        case Field::DIntPkt:
        case Field::DIntPktMax:
        case Field::DIntPktMin:
        case Field::TcpRtt:
        case Field::SynAck:
        case Field::AckDat:
        case Field::Mean:
        case Field::StdDev:
        case Field::Max:
        case Field::Min:
            return true;
        default:
            return false;
    }
}

std::vector<Field> parse_field_selection(std::string_view spec) {
    if (spec == "all") return {kAll.begin(), kAll.end()};
    std::vector<Field> out;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const auto comma = spec.find(',', pos);
        auto name = spec.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
        while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
        if (!name.empty()) {
            auto f = field_from_name(name);
            if (!f) throw DatasetError(fmt::format("unknown feature '{}'; valid features: {}", name, valid_names()));
            out.push_back(*f);
        }
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw DatasetError("empty feature selection; valid features: " + valid_names());
    return out;
}

std::string format_field(const FeatureVector& v, Field f) {
    switch (f) {
        case Field::FlowID: return std::to_string(v.flow_id);
        case Field::Rank: return std::to_string(v.rank);
        case Field::SrcAddr: return v.src_addr.to_string();
        case Field::Sport: return std::to_string(v.sport);
        case Field::DstAddr: return v.dst_addr.to_string();
        case Field::Dport: return std::to_string(v.dport);
        case Field::Proto: return v.proto.name();
        case Field::State: return std::string(state_name(v.state));
        case Field::Dur: return f6(v.dur);
        case Field::SrcBytes: return std::to_string(v.src_bytes);
        case Field::DstBytes: return std::to_string(v.dst_bytes);
        case Field::sTtl: return std::to_string(v.s_ttl);
        case Field::dTtl: return std::to_string(v.d_ttl);
        case Field::SrcLoss: return std::to_string(v.src_loss);
        case Field::DstLoss: return std::to_string(v.dst_loss);
        case Field::SrcLoad: return f6(v.src_load);
        case Field::DstLoad: return f6(v.dst_load);
        case Field::SrcPkts: return std::to_string(v.src_pkts);
        case Field::DstPkts: return std::to_string(v.dst_pkts);
        case Field::SrcWin: return std::to_string(v.src_win);
        case Field::DstWin: return std::to_string(v.dst_win);
        case Field::SrcTCPBase: return std::to_string(v.src_tcp_base);
        case Field::DstTCPBase: return std::to_string(v.dst_tcp_base);
        case Field::sMeanPktSz: return f6(v.s_mean_pkt_sz);
        case Field::dMeanPktSz: return f6(v.d_mean_pkt_sz);
        case Field::SrcJitter: return f6(v.src_jitter);
        case Field::DstJitter: return f6(v.dst_jitter);
        case Field::SIntPkt: return f6(v.s_int_pkt.mean_ms);
        case Field::SIntPktMax: return f6(v.s_int_pkt.max_ms);
        case Field::SIntPktMin: return f6(v.s_int_pkt.min_ms);
        case Field::DIntPkt: return f6(v.d_int_pkt.mean_ms);
        case Field::DIntPktMax: return f6(v.d_int_pkt.max_ms);
        case Field::DIntPktMin: return f6(v.d_int_pkt.min_ms);
        case Field::StartTime: return format_iso_utc(v.start_time);
        case Field::LastTime: return format_iso_utc(v.last_time);
        case Field::TcpRtt: return f6(v.tcp_rtt);
        case Field::SynAck: return f6(v.syn_ack);
        case Field::AckDat: return f6(v.ack_dat);
        case Field::Mean: return f6(v.active.mean_ms);
        case Field::StdDev: return f6(v.active.stddev_ms);
        case Field::Max: return f6(v.active.max_ms);
        case Field::Min: return f6(v.active.min_ms);
        case Field::GTLabel: return v.gt_label;
    }
    return {};
}

void parse_field(FeatureVector& v, Field f, std::string_view t) {
    switch (f) {
        case Field::FlowID: v.flow_id = parse_uint<std::uint64_t>(f, t); break;
        case Field::Rank: v.rank = parse_uint<std::uint64_t>(f, t); break;
        case Field::SrcAddr:
        case Field::DstAddr: {
            auto a = IpAddress::try_parse(t);
            if (!a) throw DatasetError(fmt::format("invalid {} value '{}'", field_name(f), t));
            (f == Field::SrcAddr ? v.src_addr : v.dst_addr) = *a;
            break;
        }
        case Field::Sport: v.sport = parse_uint<std::uint16_t>(f, t); break;
        case Field::Dport: v.dport = parse_uint<std::uint16_t>(f, t); break;
        case Field::Proto: v.proto = parse_protocol(t); break;
        case Field::State: {
            auto s = parse_state(t);
            if (!s) throw DatasetError(fmt::format("invalid State value '{}'", t));
            v.state = *s;
            break;
        }
        case Field::Dur: v.dur = parse_double(f, t); break;
        case Field::SrcBytes: v.src_bytes = parse_uint<std::uint64_t>(f, t); break;
        case Field::DstBytes: v.dst_bytes = parse_uint<std::uint64_t>(f, t); break;
        case Field::sTtl: v.s_ttl = parse_uint<std::uint8_t>(f, t); break;
        case Field::dTtl: v.d_ttl = parse_uint<std::uint8_t>(f, t); break;
        case Field::SrcLoss: v.src_loss = parse_uint<std::uint64_t>(f, t); break;
        case Field::DstLoss: v.dst_loss = parse_uint<std::uint64_t>(f, t); break;
        case Field::SrcLoad: v.src_load = parse_double(f, t); break;
        case Field::DstLoad: v.dst_load = parse_double(f, t); break;
        case Field::SrcPkts: v.src_pkts = parse_uint<std::uint64_t>(f, t); break;
        case Field::DstPkts: v.dst_pkts = parse_uint<std::uint64_t>(f, t); break;
        case Field::SrcWin: v.src_win = parse_uint<std::uint16_t>(f, t); break;
        case Field::DstWin: v.dst_win = parse_uint<std::uint16_t>(f, t); break;
        case Field::SrcTCPBase: v.src_tcp_base = parse_uint<std::uint32_t>(f, t); break;
        case Field::DstTCPBase: v.dst_tcp_base = parse_uint<std::uint32_t>(f, t); break;
        case Field::sMeanPktSz: v.s_mean_pkt_sz = parse_double(f, t); break;
        case Field::dMeanPktSz: v.d_mean_pkt_sz = parse_double(f, t); break;
        case Field::SrcJitter: v.src_jitter = parse_double(f, t); break;
        case Field::DstJitter: v.dst_jitter = parse_double(f, t); break;
        case Field::SIntPkt: v.s_int_pkt.mean_ms = parse_double(f, t); break;
        case Field::SIntPktMax: v.s_int_pkt.max_ms = parse_double(f, t); break;
        case Field::SIntPktMin: v.s_int_pkt.min_ms = parse_double(f, t); break;
        case Field::DIntPkt: v.d_int_pkt.mean_ms = parse_double(f, t); break;
        case Field::DIntPktMax: v.d_int_pkt.max_ms = parse_double(f, t); break;
        case Field::DIntPktMin: v.d_int_pkt.min_ms = parse_double(f, t); break;
        case Field::StartTime: v.start_time = parse_timestamp(f, t); break;
        case Field::LastTime: v.last_time = parse_timestamp(f, t); break;
        case Field::TcpRtt: v.tcp_rtt = parse_double(f, t); break;
        case Field::SynAck: v.syn_ack = parse_double(f, t); break;
        case Field::AckDat: v.ack_dat = parse_double(f, t); break;
        case Field::Mean: v.active.mean_ms = parse_double(f, t); break;
        case Field::StdDev: v.active.stddev_ms = parse_double(f, t); break;
        case Field::Max: v.active.max_ms = parse_double(f, t); break;
        case Field::Min: v.active.min_ms = parse_double(f, t); break;
        case Field::GTLabel: v.gt_label = std::string(t); break;
    }
}

FlowCsvWriter::FlowCsvWriter(std::ostream& out, std::vector<Field> selection)
    : out_(out), selection_(std::move(selection)) {
    if (selection_.empty()) throw DatasetError("empty feature selection; valid features: " + valid_names());
    csv::Row header;
    for (auto f : selection_) header.emplace_back(field_name(f));
    csv::write_row(out_, header);
}

void FlowCsvWriter::write(const FeatureVector& v) {
    csv::Row row;
    row.reserve(selection_.size());
    for (auto f : selection_) row.push_back(format_field(v, f));
    csv::write_row(out_, row);
    ++rows_;
}

std::uint64_t write_csv(std::span<const FeatureVector> records, std::span<const Field> selection,
                        const std::string& path) {
    if (selection.empty()) throw DatasetError("empty feature selection; valid features: " + valid_names());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DatasetError("cannot write " + path);
    FlowCsvWriter writer(out, {selection.begin(), selection.end()});
    for (const auto& r : records) writer.write(r);
    out.flush();
    if (!out) throw DatasetError("write failed: " + path);
    return writer.rows();
}

std::optional<std::size_t> FlowDataset::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == name) return i;
    return std::nullopt;
}

FlowDataset read_flow_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open " + path);
    csv::Reader reader(in);
    FlowDataset ds;
    try {
        auto header = reader.next();
        if (!header) throw DatasetError(path + ": missing header row");
        for (auto& name : *header) ds.columns.push_back({name, field_from_name(name)});
        while (auto row = reader.next()) {
            if (row->size() == 1 && row->front().empty()) continue;  // blank line
            if (row->size() != ds.columns.size())
                throw DatasetError(fmt::format("{}:{}: expected {} fields, found {}", path, reader.line(),
                                               ds.columns.size(), row->size()));
            FeatureVector v;
            std::vector<std::string> extra;
            for (std::size_t i = 0; i < row->size(); ++i) {
                if (ds.columns[i].field) {
                    try {
                        parse_field(v, *ds.columns[i].field, (*row)[i]);
                    } catch (const DatasetError& e) {
                        throw DatasetError(fmt::format("{}:{}: {}", path, reader.line(), e.what()));
                    }
                } else {
                    extra.push_back(std::move((*row)[i]));
                }
            }
            ds.records.push_back(std::move(v));
            ds.extras.push_back(std::move(extra));
        }
    } catch (const csv::ParseError& e) {
        throw DatasetError(fmt::format("{}:{}: {}", path, e.line(), e.what()));
    }
    return ds;
}

std::vector<std::pair<std::string, std::uint64_t>> DatasetSummary::ordered() const {
    std::vector<std::pair<std::string, std::uint64_t>> v(class_counts.begin(), class_counts.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return v;
}

void DatasetSummary::add(const std::string& label, std::uint64_t n) {
    class_counts[label] += n;
    total += n;
}

DatasetSummary summarize(std::span<const FeatureVector> records, std::string name) {
    DatasetSummary s;
    s.name = std::move(name);
    for (const auto& r : records) s.add(r.gt_label);
    return s;
}

DatasetSummary summarize_csv(const std::string& path, std::string_view label_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open " + path);
    csv::Reader reader(in);
    DatasetSummary s;
    s.name = path;
    try {
        auto header = reader.next();
        if (!header) throw DatasetError(path + ": missing header row");
        auto it = std::find(header->begin(), header->end(), label_column);
        if (it == header->end())
            throw DatasetError(fmt::format("{}: no column named '{}'", path, label_column));
        const auto col = static_cast<std::size_t>(it - header->begin());
        while (auto row = reader.next()) {
            if (row->size() == 1 && row->front().empty()) continue;
            if (row->size() != header->size())
                throw DatasetError(fmt::format("{}:{}: expected {} fields, found {}", path, reader.line(),
                                               header->size(), row->size()));
            s.add((*row)[col]);
        }
    } catch (const csv::ParseError& e) {
        throw DatasetError(fmt::format("{}:{}: {}", path, e.line(), e.what()));
    }
    return s;
}

DatasetSummary read_summary_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open " + path);
    csv::Reader reader(in);
    DatasetSummary s;
    s.name = path;
    auto header = reader.next();
    if (!header || header->size() != 2 || (*header)[0] != "label" || (*header)[1] != "count")
        throw DatasetError(path + ": expected header 'label,count'");
    while (auto row = reader.next()) {
        if (row->size() == 1 && row->front().empty()) continue;
        if (row->size() != 2) throw DatasetError(fmt::format("{}:{}: expected 2 fields", path, reader.line()));
        std::uint64_t n = 0;
        const auto& c = (*row)[1];
        auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), n);
        if (ec != std::errc{} || p != c.data() + c.size())
            throw DatasetError(fmt::format("{}:{}: invalid count '{}'", path, reader.line(), c));
        s.add((*row)[0], n);
    }
    return s;
}

void write_summary_csv(const DatasetSummary& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DatasetError("cannot write " + path);
    csv::write_row(out, {"label", "count"});
    for (const auto& [label, n] : s.ordered()) csv::write_row(out, {label, std::to_string(n)});
    if (!out.flush()) throw DatasetError("write failed: " + path);
}

std::string render_summary_table(const DatasetSummary& s) {
    std::size_t width = 5;
    for (const auto& [label, n] : s.class_counts) width = std::max(width, label.size());
    std::string out = fmt::format("{:<{}}  {:>12}  {:>8}\n", "Class", width, "Flows", "Share");
    for (const auto& [label, n] : s.ordered()) {
        const double share = s.total ? 100.0 * static_cast<double>(n) / static_cast<double>(s.total) : 0.0;
        out += fmt::format("{:<{}}  {:>12}  {:>7.2f}%\n", label, width, n, share);
    }
    out += fmt::format("{:<{}}  {:>12}\n", "Total", width, s.total);
    return out;
}

Comparison compare_summaries(const DatasetSummary& a, const DatasetSummary& b) {
    Comparison c;
    c.a_name = a.name;
    c.b_name = b.name;
    std::map<std::string, ComparisonRow> rows;
    for (const auto& [label, n] : a.class_counts) rows[label].a = n;
    for (const auto& [label, n] : b.class_counts) rows[label].b = n;
    for (auto& [label, row] : rows) {
        row.label = label;
        row.diff = static_cast<std::int64_t>(row.b) - static_cast<std::int64_t>(row.a);
        row.ratio = row.a == 0 ? std::numeric_limits<double>::infinity()
                               : static_cast<double>(row.b) / static_cast<double>(row.a);
        c.rows.push_back(row);
    }
    std::stable_sort(c.rows.begin(), c.rows.end(), [](const ComparisonRow& x, const ComparisonRow& y) {
        return x.a != y.a ? x.a > y.a : x.b > y.b;
    });

    double worst = 1.0;  // equal counts everywhere: nothing flagged
    for (std::size_t i = 0; i < c.rows.size(); ++i) {
        const auto& r = c.rows[i];
        const double divergence =
            (r.a == 0 || r.b == 0) ? std::numeric_limits<double>::infinity() : std::max(r.ratio, 1.0 / r.ratio);
        if (divergence > worst) {
            worst = divergence;
            c.largest_divergence = i;
        }
    }
    return c;
}

std::string format_ratio(double ratio) { return std::isinf(ratio) ? "inf" : fmt::format("{:.4f}", ratio); }

std::string render_comparison_csv(const Comparison& c) {
    std::ostringstream out;
    csv::write_row(out, {"label", "a_count", "b_count", "diff", "ratio_b_over_a", "largest_divergence"});
    for (std::size_t i = 0; i < c.rows.size(); ++i) {
        const auto& r = c.rows[i];
        csv::write_row(out, {r.label, std::to_string(r.a), std::to_string(r.b), std::to_string(r.diff),
                             format_ratio(r.ratio), c.largest_divergence == i ? "yes" : ""});
    }
    return out.str();
}

std::string render_comparison_table(const Comparison& c) {
    std::size_t width = 5;
    for (const auto& r : c.rows) width = std::max(width, r.label.size());
    const std::string a_name = c.a_name.empty() ? "A" : c.a_name;
    const std::string b_name = c.b_name.empty() ? "B" : c.b_name;
    const std::size_t wa = std::max<std::size_t>(12, a_name.size());
    const std::size_t wb = std::max<std::size_t>(12, b_name.size());
    std::string out = fmt::format("{:<{}}  {:>{}}  {:>{}}  {:>12}  {:>10}\n", "Class", width, a_name, wa, b_name, wb,
                                  "Diff", "Ratio");
    std::uint64_t ta = 0, tb = 0;
    for (std::size_t i = 0; i < c.rows.size(); ++i) {
        const auto& r = c.rows[i];
        ta += r.a;
        tb += r.b;
        out += fmt::format("{:<{}}  {:>{}}  {:>{}}  {:>12}  {:>10}{}\n", r.label, width, r.a, wa, r.b, wb, r.diff,
                           format_ratio(r.ratio), c.largest_divergence == i ? "  <- largest divergence" : "");
    }
    const double total_ratio =
        ta == 0 ? std::numeric_limits<double>::infinity() : static_cast<double>(tb) / static_cast<double>(ta);
    out += fmt::format("{:<{}}  {:>{}}  {:>{}}  {:>12}  {:>10}\n", "Total", width, ta, wa, tb, wb,
                       static_cast<std::int64_t>(tb) - static_cast<std::int64_t>(ta), format_ratio(total_ratio));
    return out;
}

}  // namespace flowset
