#include "flowset/capture.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

namespace flowset {

namespace {

// std::byteswap arrives in C++23.
constexpr std::uint16_t byteswap(std::uint16_t v) { return __builtin_bswap16(v); }
constexpr std::uint32_t byteswap(std::uint32_t v) { return __builtin_bswap32(v); }

constexpr std::uint32_t kPcapMagicMicros = 0xA1B2C3D4;
constexpr std::uint32_t kPcapMagicNanos = 0xA1B23C4D;
constexpr std::uint32_t kPcapngSectionHeader = 0x0A0D0D0A;
constexpr std::uint32_t kPcapngByteOrderMagic = 0x1A2B3C4D;
constexpr std::uint32_t kPcapngInterfaceBlock = 1;
constexpr std::uint32_t kPcapngEnhancedPacket = 6;

constexpr std::uint16_t kEtherIpv4 = 0x0800;
constexpr std::uint16_t kEtherIpv6 = 0x86DD;
constexpr std::uint16_t kEtherVlan = 0x8100;
constexpr std::uint16_t kEtherQinQ = 0x88A8;

std::uint16_t be16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] << 8 | p[1]); }

std::uint32_t be32(const std::uint8_t* p) {
    return std::uint32_t{p[0]} << 24 | std::uint32_t{p[1]} << 16 | std::uint32_t{p[2]} << 8 | p[3];
}

DecodeResult skip(SkipReason reason) { return DecodeResult{std::nullopt, reason}; }

// Transport layer, given the bytes captured after the IP header(s) and the
// transport length claimed by the IP header.
DecodeResult decode_transport(PacketRecord rec, std::span<const std::uint8_t> l4,
                              std::int64_t transport_len) {
    if (transport_len < 0) return skip(SkipReason::Malformed);
    switch (rec.proto.kind) {
        case Proto::Tcp: {
            if (l4.size() < 20 || transport_len < 20) return skip(SkipReason::Malformed);
            const std::size_t header_len = static_cast<std::size_t>(l4[12] >> 4) * 4;
            if (header_len < 20 || static_cast<std::int64_t>(header_len) > transport_len)
                return skip(SkipReason::Malformed);
            rec.src_port = be16(l4.data());
            rec.dst_port = be16(l4.data() + 2);
            TcpInfo tcp;
            tcp.seq = be32(l4.data() + 4);
            tcp.flags = TcpFlags::from_byte(l4[13]);
            tcp.window = be16(l4.data() + 14);
            rec.tcp = tcp;
            rec.payload_len = static_cast<std::uint32_t>(transport_len - static_cast<std::int64_t>(header_len));
            break;
        }
        case Proto::Udp:
            if (l4.size() < 8 || transport_len < 8) return skip(SkipReason::Malformed);
            rec.src_port = be16(l4.data());
            rec.dst_port = be16(l4.data() + 2);
            rec.payload_len = static_cast<std::uint32_t>(transport_len - 8);
            break;
        case Proto::Icmp:
            if (transport_len < 8) return skip(SkipReason::Malformed);
            rec.payload_len = static_cast<std::uint32_t>(transport_len - 8);
            break;
        case Proto::Other:
            rec.payload_len = static_cast<std::uint32_t>(transport_len);
            break;
    }
    return DecodeResult{std::move(rec), SkipReason::NonIp};
}

DecodeResult decode_ipv4(std::span<const std::uint8_t> ip, Micros ts) {
    if (ip.size() < 20 || (ip[0] >> 4) != 4) return skip(SkipReason::Malformed);
    const std::size_t header_len = static_cast<std::size_t>(ip[0] & 0x0F) * 4;
    if (header_len < 20 || header_len > ip.size()) return skip(SkipReason::Malformed);
    std::uint32_t total_len = be16(ip.data() + 2);
    if (total_len == 0) total_len = static_cast<std::uint32_t>(ip.size());  // segmentation offload
    if (total_len < header_len) return skip(SkipReason::Malformed);
    if ((be16(ip.data() + 6) & 0x1FFF) != 0) return skip(SkipReason::Fragment);

    PacketRecord rec;
    rec.ts = ts;
    rec.ttl = ip[8];
    rec.proto = Protocol::from_number(ip[9], false);
    rec.src_ip = IpAddress::v4(ip.data() + 12);
    rec.dst_ip = IpAddress::v4(ip.data() + 16);
    rec.ip_bytes = total_len;
    return decode_transport(std::move(rec), ip.subspan(header_len),
                            static_cast<std::int64_t>(total_len) - static_cast<std::int64_t>(header_len));
}

DecodeResult decode_ipv6(std::span<const std::uint8_t> ip, Micros ts) {
    if (ip.size() < 40 || (ip[0] >> 4) != 6) return skip(SkipReason::Malformed);
    const std::uint32_t payload_len = be16(ip.data() + 4);
    std::uint8_t next = ip[6];
    std::size_t offset = 40;

    // extension header chain
    for (;;) {
        if (next != 0 && next != 43 && next != 44 && next != 51 && next != 60) break;
        if (offset + 8 > ip.size()) return skip(SkipReason::Malformed);
        const std::uint8_t* h = ip.data() + offset;
        std::size_t len = 0;
        if (next == 44) {
            if ((be16(h + 2) >> 3) != 0) return skip(SkipReason::Fragment);
            len = 8;
        } else if (next == 51) {
            len = (static_cast<std::size_t>(h[1]) + 2) * 4;
        } else {
            len = (static_cast<std::size_t>(h[1]) + 1) * 8;
        }
        next = h[0];
        offset += len;
        if (offset > ip.size()) return skip(SkipReason::Malformed);
    }

    PacketRecord rec;
    rec.ts = ts;
    rec.ttl = ip[7];
    rec.proto = Protocol::from_number(next, true);
    rec.src_ip = IpAddress::v6(ip.data() + 8);
    rec.dst_ip = IpAddress::v6(ip.data() + 24);
    rec.ip_bytes = 40 + payload_len;
    const std::int64_t transport_len = static_cast<std::int64_t>(rec.ip_bytes) - static_cast<std::int64_t>(offset);
    return decode_transport(std::move(rec), ip.subspan(offset), transport_len);
}

DecodeResult decode_ip(std::span<const std::uint8_t> ip, Micros ts) {
    if (ip.empty()) return skip(SkipReason::Malformed);
    switch (ip[0] >> 4) {
        case 4:
            return decode_ipv4(ip, ts);
        case 6:
            return decode_ipv6(ip, ts);
        default:
            return skip(SkipReason::NonIp);
    }
}

}  // namespace

DecodeResult decode_packet(std::span<const std::uint8_t> frame, std::uint32_t link_type, Micros ts) {
    if (link_type == kLinkRaw) return decode_ip(frame, ts);
    if (link_type != kLinkEthernet)
        throw LinkTypeError("unsupported link type " + std::to_string(link_type) +
                            " (supported: Ethernet=1, raw IP=101)");

    if (frame.size() < 14) return skip(SkipReason::Malformed);
    std::uint16_t ether_type = be16(frame.data() + 12);
    std::size_t offset = 14;
    if (ether_type == kEtherVlan || ether_type == kEtherQinQ) {
        if (frame.size() < 18) return skip(SkipReason::Malformed);
        ether_type = be16(frame.data() + 16);
        offset = 18;
        if (ether_type == kEtherVlan || ether_type == kEtherQinQ) return skip(SkipReason::StackedVlan);
    }
    const auto ip = frame.subspan(offset);
    switch (ether_type) {
        case kEtherIpv4:
            return decode_ipv4(ip, ts);
        case kEtherIpv6:
            return decode_ipv6(ip, ts);
        default:
            return skip(SkipReason::NonIp);
    }
}

void CaptureTotals::count_skip(SkipReason reason) {
    ++skipped;
    switch (reason) {
        case SkipReason::NonIp:
            ++non_ip;
            break;
        case SkipReason::Fragment:
            ++fragments;
            break;
        case SkipReason::Malformed:
            ++malformed;
            break;
        case SkipReason::StackedVlan:
            ++stacked_vlan;
            break;
        case SkipReason::Truncated:
            ++truncated;
            break;
    }
}

CaptureTotals& CaptureTotals::operator+=(const CaptureTotals& o) {
    read += o.read;
    decoded += o.decoded;
    skipped += o.skipped;
    non_ip += o.non_ip;
    fragments += o.fragments;
    malformed += o.malformed;
    stacked_vlan += o.stacked_vlan;
    truncated += o.truncated;
    return *this;
}

CaptureReader::CaptureReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw CaptureOpenError("cannot open capture file: " + path);

    std::uint32_t magic = 0;
    if (!read_bytes(&magic, 4)) throw UnsupportedFormatError(path + ": file too short for a capture header");

    if (magic == kPcapngSectionHeader) {
        pcapng_ = true;
        std::uint32_t block_len = 0;
        std::uint32_t bom = 0;
        if (!read_bytes(&block_len, 4) || !read_bytes(&bom, 4))
            throw UnsupportedFormatError(path + ": truncated PCAPNG section header");
        if (bom == kPcapngByteOrderMagic) {
            swapped_ = false;
        } else if (byteswap(bom) == kPcapngByteOrderMagic) {
            swapped_ = true;
        } else {
            throw UnsupportedFormatError(path + ": bad PCAPNG byte-order magic");
        }
        read_section_header_rest(fix32(block_len));
        return;
    }

    if (magic == kPcapMagicMicros || magic == kPcapMagicNanos) {
        swapped_ = false;
    } else if (byteswap(magic) == kPcapMagicMicros || byteswap(magic) == kPcapMagicNanos) {
        swapped_ = true;
    } else {
        throw UnsupportedFormatError(path + ": unknown capture magic number");
    }
    nanos_ = fix32(magic) == kPcapMagicNanos;

    std::uint8_t rest[20];
    if (!read_bytes(rest, sizeof rest)) throw UnsupportedFormatError(path + ": truncated PCAP file header");
    std::uint32_t network = 0;
    std::memcpy(&network, rest + 16, 4);
    link_type_ = fix32(network);
    if (link_type_ != kLinkEthernet && link_type_ != kLinkRaw)
        throw LinkTypeError(path + ": unsupported link type " + std::to_string(link_type_));
}

bool CaptureReader::read_bytes(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in_.gcount()) == n;
}

std::uint16_t CaptureReader::fix16(std::uint16_t v) const { return swapped_ ? byteswap(v) : v; }
std::uint32_t CaptureReader::fix32(std::uint32_t v) const { return swapped_ ? byteswap(v) : v; }

std::optional<CaptureReader::Frame> CaptureReader::next_classic_frame() {
    std::uint32_t hdr[4];
    in_.read(reinterpret_cast<char*>(hdr), sizeof hdr);
    const auto got = in_.gcount();
    if (got == 0) return std::nullopt;
    if (got != sizeof hdr) {
        ++totals_.read;
        totals_.count_skip(SkipReason::Truncated);
        return std::nullopt;
    }
    const std::uint32_t sec = fix32(hdr[0]);
    const std::uint32_t frac = fix32(hdr[1]);
    const std::uint32_t caplen = fix32(hdr[2]);

    Frame f;
    f.link_type = link_type_;
    f.ts = static_cast<Micros>(sec) * kMicrosPerSecond + (nanos_ ? frac / 1000 : frac);
    f.data.resize(caplen);
    if (!read_bytes(f.data.data(), caplen)) {
        ++totals_.read;
        totals_.count_skip(SkipReason::Truncated);
        return std::nullopt;
    }
    return f;
}

void CaptureReader::read_section_header_rest(std::uint32_t block_len) {
    // type, length and byte-order magic are already consumed
    if (block_len < 28 || block_len % 4 != 0) throw UnsupportedFormatError(path_ + ": bad PCAPNG section header");
    in_.ignore(block_len - 12);
    if (!in_) throw UnsupportedFormatError(path_ + ": truncated PCAPNG section header");
    interfaces_.clear();
}

void CaptureReader::read_interface_block(std::span<const std::uint8_t> body) {
    if (body.size() < 8) throw UnsupportedFormatError(path_ + ": short PCAPNG interface block");
    Interface iface;
    std::uint16_t lt = 0;
    std::memcpy(&lt, body.data(), 2);
    iface.link_type = fix16(lt);
    if (iface.link_type != kLinkEthernet && iface.link_type != kLinkRaw)
        throw LinkTypeError(path_ + ": unsupported link type " + std::to_string(iface.link_type));

    std::size_t pos = 8;
    while (pos + 4 <= body.size()) {
        std::uint16_t code = 0;
        std::uint16_t len = 0;
        std::memcpy(&code, body.data() + pos, 2);
        std::memcpy(&len, body.data() + pos + 2, 2);
        code = fix16(code);
        len = fix16(len);
        pos += 4;
        if (code == 0 || pos + len > body.size()) break;
        if (code == 9 && len >= 1) {  // if_tsresol
            const std::uint8_t v = body[pos];
            const unsigned exp = v & 0x7F;
            iface.ts_units = (v & 0x80) ? (std::uint64_t{1} << std::min(exp, 63u)) : 1;
            if (!(v & 0x80))
                for (unsigned i = 0; i < exp && i < 19; ++i) iface.ts_units *= 10;
        }
        pos += (static_cast<std::size_t>(len) + 3) & ~std::size_t{3};
    }
    interfaces_.push_back(iface);
}

std::optional<CaptureReader::Frame> CaptureReader::next_pcapng_frame() {
    for (;;) {
        std::uint32_t head[2];
        in_.read(reinterpret_cast<char*>(head), sizeof head);
        const auto got = in_.gcount();
        if (got == 0) return std::nullopt;
        if (got != sizeof head) return std::nullopt;

        const std::uint32_t raw_type = head[0];
        if (raw_type == kPcapngSectionHeader) {
            std::uint32_t bom = 0;
            if (!read_bytes(&bom, 4)) return std::nullopt;
            if (bom == kPcapngByteOrderMagic) {
                swapped_ = false;
            } else if (byteswap(bom) == kPcapngByteOrderMagic) {
                swapped_ = true;
            } else {
                return std::nullopt;
            }
            read_section_header_rest(fix32(head[1]));
            continue;
        }

        const std::uint32_t type = fix32(raw_type);
        const std::uint32_t len = fix32(head[1]);
        const bool is_packet = type == kPcapngEnhancedPacket;
        if (len < 12 || len % 4 != 0) {
            if (is_packet) {
                ++totals_.read;
                totals_.count_skip(SkipReason::Truncated);
            }
            return std::nullopt;
        }
        std::vector<std::uint8_t> body(len - 12);
        std::uint32_t trailer = 0;
        if (!read_bytes(body.data(), body.size()) || !read_bytes(&trailer, 4)) {
            if (is_packet) {
                ++totals_.read;
                totals_.count_skip(SkipReason::Truncated);
            }
            return std::nullopt;
        }

        if (type == kPcapngInterfaceBlock) {
            read_interface_block(body);
            continue;
        }
        if (!is_packet) continue;

        if (body.size() < 20) {
            ++totals_.read;
            totals_.count_skip(SkipReason::Malformed);
            continue;
        }
        std::uint32_t fields[5];
        std::memcpy(fields, body.data(), sizeof fields);
        const std::uint32_t iface_id = fix32(fields[0]);
        const std::uint64_t units = std::uint64_t{fix32(fields[1])} << 32 | fix32(fields[2]);
        const std::uint32_t caplen = fix32(fields[3]);
        if (iface_id >= interfaces_.size() || 20 + std::size_t{caplen} > body.size()) {
            ++totals_.read;
            totals_.count_skip(SkipReason::Malformed);
            continue;
        }
        const Interface& iface = interfaces_[iface_id];
        Frame f;
        f.link_type = iface.link_type;
        f.ts = static_cast<Micros>(static_cast<unsigned __int128>(units) * 1'000'000 / iface.ts_units);
        f.data.assign(body.begin() + 20, body.begin() + 20 + caplen);
        return f;
    }
}

std::optional<PacketRecord> CaptureReader::next() {
    while (!done_) {
        auto frame = pcapng_ ? next_pcapng_frame() : next_classic_frame();
        if (!frame) {
            done_ = true;
            break;
        }
        ++totals_.read;
        auto result = decode_packet(frame->data, frame->link_type, frame->ts);
        if (result.record) {
            ++totals_.decoded;
            return std::move(result.record);
        }
        totals_.count_skip(result.reason);
    }
    return std::nullopt;
}

std::vector<PacketRecord> read_all_packets(const std::string& path, CaptureTotals* totals) {
    CaptureReader reader(path);
    std::vector<PacketRecord> out;
    while (auto p = reader.next()) out.push_back(std::move(*p));
    if (totals) *totals = reader.totals();
    return out;
}

}  // namespace flowset
