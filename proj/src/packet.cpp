#include "flowset/packet.hpp"

#include <arpa/inet.h>

#include <cstring>
#include <stdexcept>

namespace flowset {

Protocol Protocol::from_number(std::uint8_t number, bool ipv6) {
    switch (number) {
        case 6:
            return {Proto::Tcp, number};
        case 17:
            return {Proto::Udp, number};
        case 1:
            if (!ipv6) return {Proto::Icmp, number};
            break;
        case 58:
            if (ipv6) return {Proto::Icmp, number};
            break;
        default:
            break;
    }
    return {Proto::Other, number};
}

std::string Protocol::name() const {
    switch (kind) {
        case Proto::Tcp:
            return "tcp";
        case Proto::Udp:
            return "udp";
        case Proto::Icmp:
            return "icmp";
        case Proto::Other:
            break;
    }
    return std::to_string(code);
}

IpAddress IpAddress::v4(const std::uint8_t* bytes) {
    IpAddress a;
    std::memcpy(a.bytes_.data(), bytes, 4);
    return a;
}

IpAddress IpAddress::v6(const std::uint8_t* bytes) {
    IpAddress a;
    std::memcpy(a.bytes_.data(), bytes, 16);
    a.v6_ = true;
    return a;
}

IpAddress IpAddress::v4(std::uint32_t host_order) {
    const std::uint8_t b[4] = {static_cast<std::uint8_t>(host_order >> 24),
                               static_cast<std::uint8_t>(host_order >> 16),
                               static_cast<std::uint8_t>(host_order >> 8),
                               static_cast<std::uint8_t>(host_order)};
    return v4(b);
}

std::optional<IpAddress> IpAddress::try_parse(std::string_view text) {
    const std::string s(text);
    std::uint8_t buf[16];
    if (inet_pton(AF_INET, s.c_str(), buf) == 1) return v4(buf);
    if (inet_pton(AF_INET6, s.c_str(), buf) == 1) return v6(buf);
    return std::nullopt;
}

IpAddress IpAddress::parse(std::string_view text) {
    auto a = try_parse(text);
    if (!a) throw std::invalid_argument("invalid IP address: " + std::string(text));
    return *a;
}

std::string IpAddress::to_string() const {
    char buf[INET6_ADDRSTRLEN];
    inet_ntop(v6_ ? AF_INET6 : AF_INET, bytes_.data(), buf, sizeof buf);
    return buf;
}

std::size_t IpAddress::hash() const {
    // FNV-1a
    std::size_t h = 1469598103934665603ULL;
    for (auto b : bytes_) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h ^ static_cast<std::size_t>(v6_);
}

TcpFlags TcpFlags::from_byte(std::uint8_t b) {
    TcpFlags f;
    f.fin = b & 0x01;
    f.syn = b & 0x02;
    f.rst = b & 0x04;
    f.psh = b & 0x08;
    f.ack = b & 0x10;
    f.urg = b & 0x20;
    return f;
}

}  // namespace flowset
