#!/usr/bin/env python3
"""Crafts the committed golden capture and its ground-truth rules, then asks
the batch oracle for the golden flow CSV.

    python3 make_fixtures.py            # rewrites fixtures next to this file

Capture contents (all times relative to 2017-07-04T09:00:00Z):
  tcp A  192.168.1.10:40000 -> 10.0.0.80:80    handshake, data, FIN/FIN close
  tcp B  192.168.1.11:40001 -> 10.0.0.80:443   handshake, data, RST
  tcp C  192.168.1.12:40002 -> 10.0.0.21:21    handshake, data with one
                                               retransmitted segment, left open
  udp D  192.168.1.10:5353 -> 10.0.0.53:53     three query/answer pairs
  udp E  192.168.1.13:6000 -> 10.0.0.99:7000   75 s stream, crosses the 60 s interval
  icmp F 192.168.1.14 -> 10.0.0.1              echo request/reply
  one ARP frame, skipped by decoders
"""

import os
import struct
import subprocess
import sys
import ipaddress

HERE = os.path.dirname(os.path.abspath(__file__))
BASE = 1499158800 * 1_000_000  # 2017-07-04T09:00:00Z

SYN, ACK, FIN, RST, PSH = 0x02, 0x10, 0x01, 0x04, 0x08


def eth(payload, ethertype=0x0800):
    return bytes.fromhex("00163e000001 00163e000002".replace(" ", "")) + struct.pack(">H", ethertype) + payload


def ipv4(src, dst, proto, l4, ttl=64):
    total = 20 + len(l4)
    hdr = struct.pack(">BBHHHBBH4s4s", 0x45, 0, total, 0x4242, 0x4000, ttl, proto, 0,
                      ipaddress.IPv4Address(src).packed, ipaddress.IPv4Address(dst).packed)
    return hdr + l4


def tcp(sport, dport, seq, ack, flags, window, payload=0):
    return struct.pack(">HHIIBBHHH", sport, dport, seq, ack, 0x50, flags, window, 0, 0) + b"\x5a" * payload


def udp(sport, dport, payload):
    return struct.pack(">HHHH", sport, dport, 8 + payload, 0) + b"\x33" * payload


def icmp(kind, ident, seq, payload=32):
    return struct.pack(">BBHHH", kind, 0, 0, ident, seq) + b"\x11" * payload


def build():
    frames = []  # (offset_us, bytes)

    def add(ms, frame):
        frames.append((round(ms * 1000), frame))

    def t(ms, src, dst, sport, dport, seq, ack, flags, win, payload=0, ttl=64):
        add(ms, eth(ipv4(src, dst, 6, tcp(sport, dport, seq, ack, flags, win, payload), ttl)))

    # tcp A: graceful close
    a, s = "192.168.1.10", "10.0.0.80"
    t(0.0, a, s, 40000, 80, 1000, 0, SYN, 64240)
    t(12.0, s, a, 80, 40000, 5000, 1001, SYN | ACK, 65160, ttl=57)
    t(20.0, a, s, 40000, 80, 1001, 5001, ACK, 502)
    t(21.0, a, s, 40000, 80, 1001, 5001, PSH | ACK, 502, 120)
    t(45.0, s, a, 80, 40000, 5001, 1121, ACK, 509, ttl=57)
    t(46.0, s, a, 80, 40000, 5001, 1121, PSH | ACK, 509, 1400, ttl=57)
    t(47.5, s, a, 80, 40000, 6401, 1121, PSH | ACK, 509, 900, ttl=57)
    t(48.0, a, s, 40000, 80, 1121, 7301, ACK, 502)
    t(300.0, a, s, 40000, 80, 1121, 7301, FIN | ACK, 502)
    t(310.0, s, a, 80, 40000, 7301, 1122, FIN | ACK, 509, ttl=57)
    t(311.0, a, s, 40000, 80, 1122, 7302, ACK, 502)

    # tcp B: reset
    b = "192.168.1.11"
    t(1000.0, b, s, 40001, 443, 70000, 0, SYN, 29200, ttl=128)
    t(1003.0, s, b, 443, 40001, 90000, 70001, SYN | ACK, 28960, ttl=57)
    t(1004.0, b, s, 40001, 443, 70001, 90001, ACK, 229, ttl=128)
    t(1010.0, b, s, 40001, 443, 70001, 90001, PSH | ACK, 229, 517, ttl=128)
    t(1040.0, s, b, 443, 40001, 90001, 70518, PSH | ACK, 235, 1200, ttl=57)
    t(1900.0, b, s, 40001, 443, 70518, 91201, RST | ACK, 0, ttl=128)

    # tcp C: retransmission, no close
    c, f = "192.168.1.12", "10.0.0.21"
    t(2000.0, c, f, 40002, 21, 4294967000, 0, SYN, 8192)
    t(2030.0, f, c, 21, 40002, 123, 4294967001, SYN | ACK, 16384, ttl=63)
    t(2031.0, c, f, 40002, 21, 4294967001, 124, ACK, 8192)
    t(2500.0, c, f, 40002, 21, 4294967001, 124, PSH | ACK, 8192, 400)   # wraps past 2^32
    t(2600.0, c, f, 40002, 21, 105, 124, PSH | ACK, 8192, 100)
    t(3600.0, c, f, 40002, 21, 4294967001, 124, PSH | ACK, 8192, 400)   # retransmission
    t(3650.0, f, c, 21, 40002, 124, 205, ACK, 16384, ttl=63)
    t(5000.0, f, c, 21, 40002, 124, 205, PSH | ACK, 16384, 60, ttl=63)
    t(5001.0, c, f, 40002, 21, 205, 184, ACK, 8192)

    # udp D: three query/answer pairs
    d, dns = "192.168.1.10", "10.0.0.53"
    for k, ms in enumerate((100.0, 2100.0, 9100.0)):
        add(ms, eth(ipv4(d, dns, 17, udp(5353, 53, 30 + k))))
        add(ms + 4.25 + k, eth(ipv4(dns, d, 17, udp(53, 5353, 90 + 10 * k), ttl=60)))

    # udp E: 75 s stream, one datagram per 5 s, a reply every third
    e, sink = "192.168.1.13", "10.0.0.99"
    for k in range(16):
        ms = 500.0 + 5000.0 * k + (7 * k % 5)
        add(ms, eth(ipv4(e, sink, 17, udp(6000, 7000, 160 + 4 * (k % 3)))))
        if k % 3 == 0:
            add(ms + 30.0, eth(ipv4(sink, e, 17, udp(7000, 6000, 48), ttl=250)))

    # icmp F
    add(700.0, eth(ipv4("192.168.1.14", "10.0.0.1", 1, icmp(8, 7, 1))))
    add(701.5, eth(ipv4("10.0.0.1", "192.168.1.14", 1, icmp(0, 7, 1), ttl=255)))

    # ARP (skipped)
    add(50.0, eth(b"\x00\x01\x08\x00\x06\x04\x00\x01" + b"\x00" * 20, 0x0806))

    frames.sort(key=lambda fr: fr[0])
    return frames


def write_pcap(path, frames):
    with open(path, "wb") as fh:
        fh.write(struct.pack("<IHHiIII", 0xA1B2C3D4, 2, 4, 0, 0, 65535, 1))
        for off, raw in frames:
            ts = BASE + off
            fh.write(struct.pack("<IIII", ts // 1_000_000, ts % 1_000_000, len(raw), len(raw)))
            fh.write(raw)


RULES = """start,end,proto,src_ip,src_port,dst_ip,dst_port,label
2017-07-04T09:00:01,2017-07-04T09:00:01.900,tcp,192.168.1.11,*,10.0.0.80,443,DoS
2017-07-04T11:00:00+02:00,2017-07-04T11:00:02+02:00,tcp,10.0.0.21,21,*,*,FTP Brute Force
2017-07-04T09:00:00,2017-07-04T09:10:00,udp,10.0.0.99,7000,192.168.1.13,*,Exploits
2017-07-04T09:00:00,2017-07-04T09:10:00,udp,*,*,10.0.0.99,*,Generic
1499158800.7015,1499158800.7015,icmp,*,,*,,Reconnaissance
2017-07-04T09:00:00.000312,2017-07-04T09:00:00.5,tcp,192.168.1.10,40000,10.0.0.80,80,Fuzzers
2017-07-04T08:00:00,2017-07-04T09:00:00.099999,udp,10.0.0.53,53,*,*,Worms
"""


def main():
    frames = build()
    pcap = os.path.join(HERE, "golden.pcap")
    rules = os.path.join(HERE, "golden_rules.csv")
    write_pcap(pcap, frames)
    with open(rules, "w", newline="") as fh:
        fh.write(RULES)
    oracle = os.path.join(HERE, "..", "oracle", "batch_oracle.py")
    subprocess.run([sys.executable, oracle, "flows", "--input", pcap, "--ground-truth", rules,
                    "--out", os.path.join(HERE, "golden_flows.csv")], check=True)
    print("%d frames" % len(frames))


if __name__ == "__main__":
    main()
