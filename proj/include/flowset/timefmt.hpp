#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "flowset/packet.hpp"

namespace flowset {

/// "YYYY-MM-DDTHH:MM:SS.ffffffZ"
std::string format_iso_utc(Micros t);

struct ParsedTime {
    Micros utc_or_naive = 0;
    bool has_offset = false;  // false: naive local time
};

/// Accepts "YYYY-MM-DD[T ]HH:MM[:SS[.f{1,9}]]" optionally followed by "Z" or
/// "±HH[:MM]", or a plain decimal epoch-seconds number (treated as UTC).
std::optional<ParsedTime> parse_time(std::string_view text);

}  // namespace flowset
