#include "flowset/ground_truth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>

#include "flowset/csv.hpp"
#include "flowset/timefmt.hpp"

namespace flowset {

namespace {

constexpr std::array<std::string_view, 8> kHeader = {"start",  "end",    "proto",    "src_ip",
                                                      "src_port", "dst_ip", "dst_port", "label"};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

bool is_wildcard(std::string_view s) { return s == "*" || s.empty(); }

}  // namespace

std::vector<GroundTruthRule> parse_ground_truth(std::istream& in, std::int64_t tz_offset_seconds,
                                                const std::string& source) {
    csv::Reader reader(in);
    std::vector<GroundTruthRule> rules;
    auto fail = [&](const std::string& msg) -> GroundTruthError {
        return GroundTruthError(fmt::format("{}:{}: {}", source, reader.line(), msg), reader.line());
    };

    try {
        auto header = reader.next();
        if (!header) throw GroundTruthError(source + ": empty ground-truth file (header required)", 1);
        std::vector<std::string> names;
        for (auto& h : *header) names.push_back(lower(trim(h)));
        if (!std::equal(names.begin(), names.end(), kHeader.begin(), kHeader.end()))
            throw fail("expected header: start,end,proto,src_ip,src_port,dst_ip,dst_port,label");

        while (auto row = reader.next()) {
            if (row->size() == 1 && trim(row->front()).empty()) continue;
            if (row->size() != kHeader.size())
                throw fail(fmt::format("expected {} fields, found {}", kHeader.size(), row->size()));
            std::vector<std::string> f;
            for (auto& v : *row) f.push_back(trim(v));

            GroundTruthRule rule;
            auto time = [&](const std::string& text, const char* what) {
                auto t = parse_time(text);
                if (!t) throw fail(fmt::format("invalid {} time '{}'", what, text));
                return t->has_offset ? t->utc_or_naive : t->utc_or_naive - tz_offset_seconds * kMicrosPerSecond;
            };
            rule.start_ts = time(f[0], "start");
            rule.end_ts = time(f[1], "end");
            if (rule.start_ts > rule.end_ts) throw fail("attack window ends before it starts");

            const std::string proto = lower(f[2]);
            if (proto == "tcp") {
                rule.proto = Protocol::tcp();
            } else if (proto == "udp") {
                rule.proto = Protocol::udp();
            } else if (proto == "icmp") {
                rule.proto = Protocol::icmp();
            } else if (proto != "any" && proto != "*") {
                unsigned n = 0;
                auto [p, ec] = std::from_chars(proto.data(), proto.data() + proto.size(), n);
                if (ec != std::errc{} || p != proto.data() + proto.size() || n > 255)
                    throw fail(fmt::format("unknown protocol '{}'", f[2]));
                rule.proto = Protocol::from_number(static_cast<std::uint8_t>(n), false);
            }

            auto ip = [&](const std::string& text) -> std::optional<IpAddress> {
                if (is_wildcard(text)) return std::nullopt;
                auto a = IpAddress::try_parse(text);
                if (!a) throw fail(fmt::format("invalid IP address '{}'", text));
                return a;
            };
            auto port = [&](const std::string& text) -> std::optional<std::uint16_t> {
                if (is_wildcard(text)) return std::nullopt;
                std::uint16_t v = 0;
                auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
                if (ec != std::errc{} || p != text.data() + text.size()) throw fail(fmt::format("invalid port '{}'", text));
                return v;
            };
            rule.src_ip = ip(f[3]);
            rule.src_port = port(f[4]);
            rule.dst_ip = ip(f[5]);
            rule.dst_port = port(f[6]);
            rule.label = f[7];
            if (rule.label.empty()) throw fail("empty label");
            if (rule.label == kBenignLabel) throw fail("rule label must differ from the default 'Benign'");
            rules.push_back(std::move(rule));
        }
    } catch (const csv::ParseError& e) {
        throw GroundTruthError(fmt::format("{}:{}: {}", source, e.line(), e.what()), e.line());
    }
    return rules;
}

std::vector<GroundTruthRule> parse_ground_truth(const std::string& path, std::int64_t tz_offset_seconds) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GroundTruthError("cannot open ground-truth file " + path, 0);
    return parse_ground_truth(in, tz_offset_seconds, path);
}

bool intervals_overlap(Micros a_start, Micros a_end, Micros b_start, Micros b_end) {
    return a_start <= b_end && b_start <= a_end;
}

bool rule_matches(const GroundTruthRule& rule, const FeatureVector& r) {
    if (rule.proto) {
        const bool same = rule.proto->kind == Proto::Other ? r.proto.kind == Proto::Other && r.proto.code == rule.proto->code
                                                           : r.proto.kind == rule.proto->kind;
        if (!same) return false;
    }
    if (!intervals_overlap(r.start_time, r.last_time, rule.start_ts, rule.end_ts)) return false;

    auto endpoint = [](const std::optional<IpAddress>& ip, const std::optional<std::uint16_t>& port,
                       const IpAddress& a, std::uint16_t p) {
        return (!ip || *ip == a) && (!port || *port == p);
    };
    const bool forward = endpoint(rule.src_ip, rule.src_port, r.src_addr, r.sport) &&
                         endpoint(rule.dst_ip, rule.dst_port, r.dst_addr, r.dport);
    const bool reverse = endpoint(rule.src_ip, rule.src_port, r.dst_addr, r.dport) &&
                         endpoint(rule.dst_ip, rule.dst_port, r.src_addr, r.sport);
    return forward || reverse;
}

std::string match_label(const FeatureVector& r, std::span<const GroundTruthRule> rules) {
    for (const auto& rule : rules)
        if (rule_matches(rule, r)) return rule.label;
    return std::string(kBenignLabel);
}

DatasetSummary label_dataset(std::span<FeatureVector> records, std::span<const GroundTruthRule> rules) {
    DatasetSummary s;
    for (auto& r : records) {
        r.gt_label = match_label(r, rules);
        s.add(r.gt_label);
    }
    return s;
}

}  // namespace flowset
