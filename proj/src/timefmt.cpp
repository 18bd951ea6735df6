#include "flowset/timefmt.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <chrono>

namespace flowset {

namespace {

using namespace std::chrono;

bool read_int(std::string_view s, std::size_t& pos, std::size_t digits, int& out) {
    if (pos + digits > s.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < digits; ++i) {
        const char c = s[pos + i];
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    pos += digits;
    return true;
}

bool expect(std::string_view s, std::size_t& pos, char c) {
    if (pos >= s.size() || s[pos] != c) return false;
    ++pos;
    return true;
}

std::optional<Micros> parse_epoch_seconds(std::string_view s) {
    // digits with an optional fraction, no exponent
    std::size_t pos = 0;
    bool negative = false;
    if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) negative = s[pos++] == '-';
    const std::size_t int_begin = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == int_begin) return std::nullopt;
    std::int64_t whole = 0;
    if (std::from_chars(s.data() + int_begin, s.data() + pos, whole).ec != std::errc{}) return std::nullopt;
    std::int64_t frac = 0;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::int64_t scale = 100000;
        const std::size_t frac_begin = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            frac += (s[pos] - '0') * scale;
            scale /= 10;
            ++pos;
        }
        if (pos == frac_begin) return std::nullopt;
    }
    if (pos != s.size()) return std::nullopt;
    const Micros v = whole * kMicrosPerSecond + frac;
    return negative ? -v : v;
}

}  // namespace

std::string format_iso_utc(Micros t) {
    const sys_time<microseconds> tp{microseconds{t}};
    const auto day = floor<days>(tp);
    const year_month_day ymd{day};
    const hh_mm_ss<microseconds> hms{tp - day};
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:06}Z", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hms.hours().count(),
                       hms.minutes().count(), hms.seconds().count(), hms.subseconds().count());
}

std::optional<ParsedTime> parse_time(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);

    if (s.find('-', 1) == std::string_view::npos && s.find(':') == std::string_view::npos) {
        if (auto v = parse_epoch_seconds(s)) return ParsedTime{*v, true};
        return std::nullopt;
    }

    std::size_t pos = 0;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    if (!read_int(s, pos, 4, y) || !expect(s, pos, '-') || !read_int(s, pos, 2, mo) || !expect(s, pos, '-') ||
        !read_int(s, pos, 2, d))
        return std::nullopt;
    if (pos >= s.size() || (s[pos] != 'T' && s[pos] != ' ')) return std::nullopt;
    ++pos;
    if (!read_int(s, pos, 2, h) || !expect(s, pos, ':') || !read_int(s, pos, 2, mi)) return std::nullopt;
    if (pos < s.size() && s[pos] == ':' && !(++pos, read_int(s, pos, 2, sec))) return std::nullopt;

    Micros frac = 0;
    if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
        ++pos;
        Micros scale = 100000;
        const std::size_t begin = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            frac += (s[pos] - '0') * scale;
            scale /= 10;
            ++pos;
        }
        if (pos == begin || pos - begin > 9) return std::nullopt;
    }

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;

    ParsedTime out;
    Micros t = duration_cast<microseconds>(sys_days{ymd}.time_since_epoch()).count();
    t += ((static_cast<Micros>(h) * 60 + mi) * 60 + sec) * kMicrosPerSecond + frac;

    if (pos < s.size()) {
        if (s[pos] == 'Z' || s[pos] == 'z') {
            ++pos;
            out.has_offset = true;
        } else if (s[pos] == '+' || s[pos] == '-') {
            const bool minus = s[pos] == '-';
            ++pos;
            int oh = 0, om = 0;
            if (!read_int(s, pos, 2, oh)) return std::nullopt;
            if (pos < s.size() && s[pos] == ':') ++pos;
            if (pos < s.size() && !read_int(s, pos, 2, om)) return std::nullopt;
            if (oh > 23 || om > 59) return std::nullopt;
            const Micros offset = (static_cast<Micros>(oh) * 60 + om) * 60 * kMicrosPerSecond;
            t -= minus ? -offset : offset;
            out.has_offset = true;
        }
    }
    if (pos != s.size()) return std::nullopt;
    out.utc_or_naive = t;
    return out;
}

}  // namespace flowset
