#pragma once

// Test-only packet crafting: builds Ethernet/IP frames and writes classic
// PCAP or PCAPNG files.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "flowset/packet.hpp"

namespace flowset::testing {

struct FrameSpec {
    Micros ts = 0;
    std::string src = "10.0.0.1";
    std::string dst = "10.0.0.2";
    std::uint8_t proto = 6;  // IP protocol number
    std::uint16_t sport = 1234;
    std::uint16_t dport = 80;
    std::uint8_t ttl = 64;
    std::uint32_t seq = 0;
    std::uint8_t tcp_flags = 0;  // FIN=1 SYN=2 RST=4 PSH=8 ACK=16 URG=32
    std::uint16_t window = 1024;
    std::uint32_t payload = 0;
    std::uint16_t frag_offset = 0;  // in 8-byte units
    bool more_fragments = false;
    int vlan_tags = 0;
    bool raw_ip = false;  // no Ethernet header
};

inline constexpr std::uint8_t kFin = 0x01;
inline constexpr std::uint8_t kSyn = 0x02;
inline constexpr std::uint8_t kRst = 0x04;
inline constexpr std::uint8_t kPsh = 0x08;
inline constexpr std::uint8_t kAck = 0x10;

std::vector<std::uint8_t> build_frame(const FrameSpec& f);
std::vector<std::uint8_t> build_arp_frame();

struct CapturedFrame {
    Micros ts = 0;
    std::vector<std::uint8_t> bytes;
};

enum class PcapFlavor { Micros, Nanos, MicrosSwapped, NanosSwapped };

void write_pcap(const std::string& path, const std::vector<CapturedFrame>& frames,
                std::uint32_t link_type = 1, PcapFlavor flavor = PcapFlavor::Micros);
void write_pcapng(const std::string& path, const std::vector<CapturedFrame>& frames,
                  std::uint32_t link_type = 1, int tsresol_exp = 6);

/// Frames from specs, Ethernet framing unless spec.raw_ip.
std::vector<CapturedFrame> frames_from(const std::vector<FrameSpec>& specs);

/// Unique path under the system temp directory.
std::string temp_path(const std::string& stem);

}  // namespace flowset::testing
