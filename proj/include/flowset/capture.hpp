#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowset/packet.hpp"

namespace flowset {

class CaptureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The file could not be opened or read.
class CaptureOpenError : public CaptureError {
public:
    using CaptureError::CaptureError;
};

/// Magic number is neither classic PCAP nor PCAPNG.
class UnsupportedFormatError : public CaptureError {
public:
    using CaptureError::CaptureError;
};

/// Link type the decoder does not handle.
class LinkTypeError : public CaptureError {
public:
    using CaptureError::CaptureError;
};

inline constexpr std::uint32_t kLinkEthernet = 1;
inline constexpr std::uint32_t kLinkRaw = 101;

enum class SkipReason : std::uint8_t {
    NonIp,
    Fragment,
    Malformed,
    StackedVlan,
    Truncated,
};

/// Outcome of decoding one frame: a record, or the reason it was dropped.
struct DecodeResult {
    std::optional<PacketRecord> record;
    SkipReason reason = SkipReason::NonIp;
};

/// Decodes one link-layer frame. `ts` is copied into the record untouched.
/// Throws LinkTypeError for link types other than Ethernet and raw IP.
DecodeResult decode_packet(std::span<const std::uint8_t> frame, std::uint32_t link_type,
                           Micros ts = 0);

struct CaptureTotals {
    std::uint64_t read = 0;
    std::uint64_t decoded = 0;
    std::uint64_t skipped = 0;
    // breakdown of `skipped`
    std::uint64_t non_ip = 0;
    std::uint64_t fragments = 0;
    std::uint64_t malformed = 0;
    std::uint64_t stacked_vlan = 0;
    std::uint64_t truncated = 0;

    void count_skip(SkipReason reason);
    CaptureTotals& operator+=(const CaptureTotals& other);
};

/// Sequential reader over a classic PCAP or PCAPNG file, yielding decoded
/// packet records in file order.
class CaptureReader {
public:
    explicit CaptureReader(const std::string& path);

    /// Next decoded packet, or nullopt at end of file. Non-IP and
    /// undecodable frames are skipped and counted.
    std::optional<PacketRecord> next();

    const CaptureTotals& totals() const { return totals_; }
    bool is_pcapng() const { return pcapng_; }

private:
    struct Frame {
        std::vector<std::uint8_t> data;
        std::uint32_t link_type = 0;
        Micros ts = 0;
    };

    bool read_bytes(void* dst, std::size_t n);
    std::uint16_t fix16(std::uint16_t v) const;
    std::uint32_t fix32(std::uint32_t v) const;

    std::optional<Frame> next_classic_frame();
    std::optional<Frame> next_pcapng_frame();
    void read_section_header_rest(std::uint32_t block_len);
    void read_interface_block(std::span<const std::uint8_t> body);

    struct Interface {
        std::uint32_t link_type = 0;
        // timestamp units per second
        std::uint64_t ts_units = 1'000'000;
    };

    std::ifstream in_;
    std::string path_;
    CaptureTotals totals_;
    bool pcapng_ = false;
    bool swapped_ = false;
    bool nanos_ = false;
    bool done_ = false;
    std::uint32_t link_type_ = 0;
    std::vector<Interface> interfaces_;
};

/// Reads every packet of a capture file.
std::vector<PacketRecord> read_all_packets(const std::string& path, CaptureTotals* totals = nullptr);

}  // namespace flowset
