#include "flowrep/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "flowrep/errors.hpp"
#include "flowrep/rng.hpp"

namespace flowrep {

namespace {

constexpr uint32_t kSrcPoolBase = (10u << 24) | (77u << 16);  // 10.77.0.0/16
constexpr uint32_t kDstPoolBase = (10u << 24) | (88u << 16);  // 10.88.0.0/16

size_t min_frame_bytes(uint8_t protocol) {
    return protocol == kProtoTcp ? 54 : protocol == kProtoUdp ? 42 : 34;
}

void validate(const TrafficProfile& p) {
    if (p.n_flows < 1) throw InvalidProfile("n_flows must be >= 1");
    if (p.pkts_min < 2 || p.pkts_max < p.pkts_min) {
        throw InvalidProfile("pkts_per_flow must satisfy 2 <= min <= max");
    }
    if (p.iat.kind == IatDist::Kind::Exponential) {
        if (!(p.iat.rate > 0.0) || !std::isfinite(p.iat.rate)) {
            throw InvalidProfile("exponential iat rate must be positive");
        }
    } else if (!(p.iat.lo >= 0.0) || !(p.iat.hi >= p.iat.lo) ||
               !std::isfinite(p.iat.hi)) {
        throw InvalidProfile("uniform iat bounds invalid");
    }
    if (!std::isfinite(p.size.mean) || !std::isfinite(p.size.std) ||
        p.size.std < 0.0 || p.size.lo > p.size.hi) {
        throw InvalidProfile("size distribution invalid");
    }
    if (p.ttl.mean < 1.0 || p.ttl.mean > 255.0 || p.ttl.std < 0.0) {
        throw InvalidProfile("ttl out of range");
    }
    for (double q : p.flags.prob) {
        if (!(q >= 0.0 && q <= 1.0)) throw InvalidProfile("flag probability out of [0,1]");
    }
    if (p.protocol != kProtoTcp && p.protocol != kProtoUdp) {
        throw InvalidProfile("protocol must be TCP or UDP");
    }
}

double quantize_usec(double t) { return std::round(t * 1e6) / 1e6; }

}  // namespace

SynthResult generate(std::span<const TrafficProfile> profiles, uint64_t seed) {
    for (const auto& p : profiles) validate(p);

    SynthResult out;
    struct Tagged {
        Packet pkt;
        size_t order;
    };
    std::vector<Tagged> tagged;

    for (size_t pi = 0; pi < profiles.size(); ++pi) {
        const TrafficProfile& prof = profiles[pi];
        Rng rng(mix_seed(seed, pi));

        const uint32_t src_ip =
            prof.src_ip ? prof.src_ip : kSrcPoolBase | static_cast<uint32_t>(pi + 1);
        if (std::find(out.monitored_src.begin(), out.monitored_src.end(), src_ip) ==
            out.monitored_src.end()) {
            out.monitored_src.push_back(src_ip);
        }
        const size_t min_frame = min_frame_bytes(prof.protocol);

        for (int fi = 0; fi < prof.n_flows; ++fi) {
            // Unique five-tuple: per-profile source port band, rotating dst.
            const uint32_t lane = static_cast<uint32_t>(fi);
            const uint16_t src_port =
                static_cast<uint16_t>(10000 + (pi * 10000 + lane % 10000) % 50000);
            const uint32_t dst_ip = kDstPoolBase |
                                    ((static_cast<uint32_t>(pi) & 0xff) << 8) |
                                    ((lane / 10000) & 0xff);
            const uint16_t dst_port = 443;

            const int n_pkts = rng.uniform_int(prof.pkts_min, prof.pkts_max);
            double t = quantize_usec(rng.uniform(0.0, 600.0));

            for (int k = 0; k < n_pkts; ++k) {
                if (k > 0) {
                    double iat = prof.iat.kind == IatDist::Kind::Exponential
                                     ? rng.exponential(prof.iat.rate)
                                     : rng.uniform(prof.iat.lo, prof.iat.hi);
                    double next = quantize_usec(t + iat);
                    if (next <= t) next = t + 1e-6;  // keep strictly increasing
                    t = quantize_usec(next);
                }
                Packet pkt;
                pkt.timestamp = t;
                pkt.src_ip = src_ip;
                pkt.dst_ip = dst_ip;
                pkt.src_port = src_port;
                pkt.dst_port = dst_port;
                pkt.protocol = prof.protocol;

                double size = rng.normal(prof.size.mean, prof.size.std);
                size = std::clamp(size, prof.size.lo, prof.size.hi);
                size = std::max(size, static_cast<double>(min_frame));
                pkt.payload_size = static_cast<uint32_t>(std::lround(size));

                double ttl = prof.ttl.std > 0.0
                                 ? rng.normal(prof.ttl.mean, prof.ttl.std)
                                 : prof.ttl.mean;
                pkt.ttl = static_cast<uint8_t>(std::clamp(std::lround(ttl), 1L, 255L));

                if (prof.protocol == kProtoTcp) {
                    uint8_t bits = 0;
                    for (int b = 0; b < 8; ++b) {
                        if (rng.uniform01() < prof.flags.prob[static_cast<size_t>(b)]) {
                            bits |= static_cast<uint8_t>(1u << b);
                        }
                    }
                    pkt.tcp_flags = TcpFlags::from_bits(bits);
                }
                tagged.push_back({pkt, tagged.size()});
            }
        }
    }

    std::sort(tagged.begin(), tagged.end(), [](const Tagged& a, const Tagged& b) {
        if (a.pkt.timestamp != b.pkt.timestamp) return a.pkt.timestamp < b.pkt.timestamp;
        return a.order < b.order;
    });
    out.packets.reserve(tagged.size());
    for (auto& t : tagged) out.packets.push_back(t.pkt);
    return out;
}

namespace {

void put_u16le(std::vector<std::byte>& v, uint16_t x) {
    v.push_back(static_cast<std::byte>(x & 0xff));
    v.push_back(static_cast<std::byte>(x >> 8));
}

void put_u32le(std::vector<std::byte>& v, uint32_t x) {
    for (int i = 0; i < 4; ++i) v.push_back(static_cast<std::byte>((x >> (8 * i)) & 0xff));
}

void put_u16be(std::vector<std::byte>& v, uint16_t x) {
    v.push_back(static_cast<std::byte>(x >> 8));
    v.push_back(static_cast<std::byte>(x & 0xff));
}

void put_u32be(std::vector<std::byte>& v, uint32_t x) {
    v.push_back(static_cast<std::byte>((x >> 24) & 0xff));
    v.push_back(static_cast<std::byte>((x >> 16) & 0xff));
    v.push_back(static_cast<std::byte>((x >> 8) & 0xff));
    v.push_back(static_cast<std::byte>(x & 0xff));
}

uint16_t ipv4_checksum(std::span<const std::byte> header) {
    uint32_t sum = 0;
    for (size_t i = 0; i + 1 < header.size(); i += 2) {
        sum += (std::to_integer<uint32_t>(header[i]) << 8) |
               std::to_integer<uint32_t>(header[i + 1]);
    }
    while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
    return static_cast<uint16_t>(~sum & 0xffff);
}

void put_mac(std::vector<std::byte>& v, uint32_t ip) {
    v.push_back(std::byte{0x02});
    v.push_back(std::byte{0x00});
    v.push_back(static_cast<std::byte>((ip >> 24) & 0xff));
    v.push_back(static_cast<std::byte>((ip >> 16) & 0xff));
    v.push_back(static_cast<std::byte>((ip >> 8) & 0xff));
    v.push_back(static_cast<std::byte>(ip & 0xff));
}

}  // namespace

std::vector<std::byte> encode_pcap(std::span<const Packet> packets) {
    std::vector<std::byte> out;
    out.reserve(24 + packets.size() * 96);

    put_u32le(out, 0xa1b2c3d4);
    put_u16le(out, 2);
    put_u16le(out, 4);
    put_u32le(out, 0);      // thiszone
    put_u32le(out, 0);      // sigfigs
    put_u32le(out, 65535);  // snaplen
    put_u32le(out, 1);      // Ethernet

    uint16_t ip_id = 0;
    for (const Packet& p : packets) {
        const size_t frame_len =
            std::max<size_t>(p.payload_size, min_frame_bytes(p.protocol));

        const int64_t total_usec = std::llround(p.timestamp * 1e6);
        put_u32le(out, static_cast<uint32_t>(total_usec / 1000000));
        put_u32le(out, static_cast<uint32_t>(total_usec % 1000000));
        put_u32le(out, static_cast<uint32_t>(frame_len));  // incl_len
        put_u32le(out, static_cast<uint32_t>(frame_len));  // orig_len

        const size_t frame_start = out.size();
        put_mac(out, p.dst_ip);
        put_mac(out, p.src_ip);
        put_u16be(out, 0x0800);

        const size_t ip_start = out.size();
        const uint16_t ip_total = static_cast<uint16_t>(frame_len - 14);
        out.push_back(std::byte{0x45});
        out.push_back(std::byte{0x00});
        put_u16be(out, ip_total);
        put_u16be(out, ip_id++);
        put_u16be(out, 0x4000);  // DF
        out.push_back(static_cast<std::byte>(p.ttl));
        out.push_back(static_cast<std::byte>(p.protocol));
        put_u16be(out, 0);  // checksum placeholder
        put_u32be(out, p.src_ip);
        put_u32be(out, p.dst_ip);
        const uint16_t csum =
            ipv4_checksum(std::span<const std::byte>(out.data() + ip_start, 20));
        out[ip_start + 10] = static_cast<std::byte>(csum >> 8);
        out[ip_start + 11] = static_cast<std::byte>(csum & 0xff);

        if (p.protocol == kProtoTcp) {
            put_u16be(out, p.src_port);
            put_u16be(out, p.dst_port);
            put_u32be(out, 0);  // seq
            put_u32be(out, 0);  // ack
            out.push_back(std::byte{0x50});
            out.push_back(static_cast<std::byte>(p.tcp_flags.bits()));
            put_u16be(out, 65535);
            put_u16be(out, 0);  // checksum (not validated by the parser)
            put_u16be(out, 0);  // urgent
        } else if (p.protocol == kProtoUdp) {
            put_u16be(out, p.src_port);
            put_u16be(out, p.dst_port);
            put_u16be(out, static_cast<uint16_t>(ip_total - 20));
            put_u16be(out, 0);
        }
        out.resize(frame_start + frame_len);  // zero padding
    }
    return out;
}

void emit_pcap(std::span<const Packet> packets, const std::filesystem::path& path) {
    const auto bytes = encode_pcap(packets);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("short write to " + path.string());
}

namespace {

FlagProfile flags_of(double fin, double syn, double rst, double psh, double ack) {
    FlagProfile f;
    f.prob = {fin, syn, rst, psh, ack, 0.0, 0.0, 0.0};
    return f;
}

TrafficProfile web_normal(int n_flows, uint32_t src_ip) {
    TrafficProfile p;
    p.n_flows = n_flows;
    p.pkts_min = 6;
    p.pkts_max = 20;
    p.iat = {IatDist::Kind::Exponential, 2.0, 0, 0};
    p.size = {700.0, 180.0, 40.0, 1500.0};
    p.ttl = {64.0, 0.0};
    p.flags = flags_of(0.05, 0.10, 0.01, 0.30, 0.90);
    p.label = Label::Normal;
    p.src_ip = src_ip;
    return p;
}

}  // namespace

// The novelty signal lives mostly in packet sizes, TTL and TCP flags; the
// timing shifts are mild. Flow-length distributions match between classes so
// zero-padding patterns do not leak the label.
Scenario make_scenario(const std::string& name, int n_train, int n_test_normal,
                       int n_test_novel) {
    const uint32_t device_a = kSrcPoolBase | 1;
    const uint32_t device_b = kSrcPoolBase | 2;

    Scenario s;
    s.name = name;
    if (name == "ddos-syn") {
        // SYN flood: slightly faster bursts of small SYN-heavy packets.
        TrafficProfile normal = web_normal(n_train, device_a);
        TrafficProfile novel = normal;
        novel.n_flows = n_test_novel;
        novel.iat = {IatDist::Kind::Exponential, 2.5, 0, 0};
        novel.size = {64.0, 8.0, 40.0, 1500.0};
        novel.flags = flags_of(0.02, 0.95, 0.05, 0.05, 0.10);
        novel.label = Label::Novel;

        s.train = {normal};
        normal.n_flows = n_test_normal;
        s.test_normal = {normal};
        s.test_novel = {novel};
    } else if (name == "new-device") {
        // A second device behind a different path: shifted TTL, mildly
        // shifted sizes, identical timing.
        TrafficProfile normal = web_normal(n_train, device_a);
        normal.pkts_min = 5;
        normal.pkts_max = 15;
        normal.size = {500.0, 150.0, 40.0, 1500.0};

        TrafficProfile novel = normal;
        novel.n_flows = n_test_novel;
        novel.src_ip = device_b;
        novel.ttl = {32.0, 0.0};
        novel.size = {520.0, 150.0, 40.0, 1500.0};
        novel.label = Label::Novel;

        s.train = {normal};
        normal.n_flows = n_test_normal;
        s.test_normal = {normal};
        s.test_novel = {novel};
    } else if (name == "new-activity") {
        // Human interaction: faster exchanges, heavier PSH/FIN, fewer ACKs.
        TrafficProfile normal = web_normal(n_train, device_a);
        normal.pkts_min = 5;
        normal.pkts_max = 15;
        normal.size = {400.0, 120.0, 40.0, 1500.0};

        TrafficProfile novel = normal;
        novel.n_flows = n_test_novel;
        novel.iat = {IatDist::Kind::Exponential, 3.0, 0, 0};
        novel.size = {430.0, 120.0, 40.0, 1500.0};
        novel.flags = flags_of(0.15, 0.10, 0.01, 0.50, 0.45);
        novel.label = Label::Novel;

        s.train = {normal};
        normal.n_flows = n_test_normal;
        s.test_normal = {normal};
        s.test_novel = {novel};
    } else {
        throw InvalidProfile("unknown scenario: " + name);
    }
    return s;
}

std::vector<std::string> scenario_names() {
    return {"ddos-syn", "new-device", "new-activity"};
}

}  // namespace flowrep
