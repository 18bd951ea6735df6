#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowset/dataset.hpp"
#include "flowset/features.hpp"

namespace flowset {

inline constexpr std::string_view kBenignLabel = "Benign";

class GroundTruthError : public std::runtime_error {
public:
    GroundTruthError(const std::string& what, std::size_t line) : std::runtime_error(what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// One attack window. Unset optionals are wildcards.
struct GroundTruthRule {
    Micros start_ts = 0;
    Micros end_ts = 0;
    std::optional<Protocol> proto;  // nullopt = "any"
    std::optional<IpAddress> src_ip;
    std::optional<IpAddress> dst_ip;
    std::optional<std::uint16_t> src_port;
    std::optional<std::uint16_t> dst_port;
    std::string label;
};

/// Parses a ground-truth CSV (header start,end,proto,src_ip,src_port,dst_ip,dst_port,label).
/// Naive timestamps are local time `tz_offset_seconds` east of UTC.
std::vector<GroundTruthRule> parse_ground_truth(const std::string& path, std::int64_t tz_offset_seconds = 0);
std::vector<GroundTruthRule> parse_ground_truth(std::istream& in, std::int64_t tz_offset_seconds = 0,
                                                const std::string& source = "<stream>");

/// Closed-interval overlap test.
bool intervals_overlap(Micros a_start, Micros a_end, Micros b_start, Micros b_end);

bool rule_matches(const GroundTruthRule& rule, const FeatureVector& r);

/// Label of the first matching rule, else "Benign".
std::string match_label(const FeatureVector& r, std::span<const GroundTruthRule> rules);

/// Labels every record in place and returns the per-class summary.
DatasetSummary label_dataset(std::span<FeatureVector> records, std::span<const GroundTruthRule> rules);

}  // namespace flowset
