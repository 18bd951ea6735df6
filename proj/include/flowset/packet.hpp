#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace flowset {

/// Capture time in microseconds since the Unix epoch.
using Micros = std::int64_t;

inline constexpr Micros kMicrosPerSecond = 1'000'000;

enum class Proto : std::uint8_t { Tcp, Udp, Icmp, Other };

/// IP protocol identity: the enumerated class plus the raw protocol number
/// (kept so that OTHER flows stay distinct per code).
struct Protocol {
    Proto kind = Proto::Other;
    std::uint8_t code = 0;

    static Protocol tcp() { return {Proto::Tcp, 6}; }
    static Protocol udp() { return {Proto::Udp, 17}; }
    static Protocol icmp() { return {Proto::Icmp, 1}; }
    static Protocol from_number(std::uint8_t number, bool ipv6);

    /// "tcp", "udp", "icmp" or the decimal protocol number.
    std::string name() const;

    auto operator<=>(const Protocol&) const = default;
};

/// IPv4 or IPv6 address. IPv4 is stored in the first 4 bytes.
class IpAddress {
public:
    IpAddress() = default;
    static IpAddress v4(const std::uint8_t* bytes);
    static IpAddress v6(const std::uint8_t* bytes);
    static IpAddress v4(std::uint32_t host_order);
    /// Throws std::invalid_argument on text that is neither IPv4 nor IPv6.
    static IpAddress parse(std::string_view text);
    static std::optional<IpAddress> try_parse(std::string_view text);

    bool is_v6() const { return v6_; }
    const std::array<std::uint8_t, 16>& bytes() const { return bytes_; }
    std::string to_string() const;
    std::size_t hash() const;

    auto operator<=>(const IpAddress&) const = default;

private:
    std::array<std::uint8_t, 16> bytes_{};
    bool v6_ = false;
};

struct TcpFlags {
    bool syn = false;
    bool ack = false;
    bool fin = false;
    bool rst = false;
    bool psh = false;
    bool urg = false;

    static TcpFlags from_byte(std::uint8_t b);
    bool operator==(const TcpFlags&) const = default;
};

struct TcpInfo {
    std::uint32_t seq = 0;
    TcpFlags flags;
    std::uint16_t window = 0;

    bool operator==(const TcpInfo&) const = default;
};

/// One decoded IP packet.
struct PacketRecord {
    Micros ts = 0;
    IpAddress src_ip;
    IpAddress dst_ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    Protocol proto;
    std::uint32_t ip_bytes = 0;     // IP header through payload
    std::uint32_t payload_len = 0;  // transport payload
    std::uint8_t ttl = 0;
    std::optional<TcpInfo> tcp;     // present iff proto is TCP

    bool operator==(const PacketRecord&) const = default;
};

}  // namespace flowset
