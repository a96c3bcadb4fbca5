#include "flowrep/capture.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "flowrep/errors.hpp"

namespace flowrep {

namespace {

constexpr uint32_t kMagicUsec = 0xa1b2c3d4;
constexpr uint32_t kMagicUsecSwapped = 0xd4c3b2a1;
constexpr uint32_t kMagicNsec = 0xa1b23c4d;
constexpr uint32_t kMagicNsecSwapped = 0x4d3cb2a1;

constexpr size_t kGlobalHeaderLen = 24;
constexpr size_t kRecordHeaderLen = 16;
constexpr size_t kEthernetLen = 14;
constexpr uint16_t kEtherTypeIpv4 = 0x0800;

uint32_t read_u32(const std::byte* p, bool swap) {
    uint32_t v;
    std::memcpy(&v, p, 4);
    if (swap) v = __builtin_bswap32(v);
    return v;
}

uint16_t read_u16be(const std::byte* p) {
    return static_cast<uint16_t>((std::to_integer<uint16_t>(p[0]) << 8) |
                                 std::to_integer<uint16_t>(p[1]));
}

}  // namespace

ParseResult parse_pcap(std::span<const std::byte> data) {
    if (data.size() < kGlobalHeaderLen) {
        throw MalformedHeader("pcap global header truncated");
    }

    uint32_t magic;
    std::memcpy(&magic, data.data(), 4);
    bool swap = false;
    double frac_unit = 1e-6;
    switch (magic) {
        case kMagicUsec: break;
        case kMagicUsecSwapped: swap = true; break;
        case kMagicNsec: frac_unit = 1e-9; break;
        case kMagicNsecSwapped:
            swap = true;
            frac_unit = 1e-9;
            break;
        default:
            throw MalformedHeader("bad pcap magic");
    }

    const uint32_t link_type = read_u32(data.data() + 20, swap);
    if (link_type != 1) {
        throw MalformedHeader("unsupported link type (want Ethernet)");
    }

    ParseResult result;
    size_t off = kGlobalHeaderLen;
    while (off < data.size()) {
        if (data.size() - off < kRecordHeaderLen) {
            result.truncated_records++;
            break;
        }
        const uint32_t ts_sec = read_u32(data.data() + off, swap);
        const uint32_t ts_frac = read_u32(data.data() + off + 4, swap);
        const uint32_t incl_len = read_u32(data.data() + off + 8, swap);
        const uint32_t orig_len = read_u32(data.data() + off + 12, swap);
        off += kRecordHeaderLen;
        if (data.size() - off < incl_len) {
            result.truncated_records++;
            break;
        }
        const std::byte* frame = data.data() + off;
        off += incl_len;

        if (incl_len < kEthernetLen) {
            result.skipped++;
            continue;
        }
        if (read_u16be(frame + 12) != kEtherTypeIpv4) {
            result.skipped++;  // ARP, IPv6, VLAN, ...
            continue;
        }

        const std::byte* ip = frame + kEthernetLen;
        const size_t ip_avail = incl_len - kEthernetLen;
        if (ip_avail < 20) {
            result.skipped++;
            continue;
        }
        const uint8_t ver_ihl = std::to_integer<uint8_t>(ip[0]);
        if ((ver_ihl >> 4) != 4) {
            result.skipped++;
            continue;
        }
        const size_t ihl = static_cast<size_t>(ver_ihl & 0x0f) * 4;
        if (ihl < 20 || ip_avail < ihl) {
            result.skipped++;
            continue;
        }

        Packet pkt;
        pkt.timestamp = static_cast<double>(ts_sec) + ts_frac * frac_unit;
        pkt.ttl = std::to_integer<uint8_t>(ip[8]);
        pkt.protocol = std::to_integer<uint8_t>(ip[9]);
        pkt.src_ip = (std::to_integer<uint32_t>(ip[12]) << 24) |
                     (std::to_integer<uint32_t>(ip[13]) << 16) |
                     (std::to_integer<uint32_t>(ip[14]) << 8) |
                     std::to_integer<uint32_t>(ip[15]);
        pkt.dst_ip = (std::to_integer<uint32_t>(ip[16]) << 24) |
                     (std::to_integer<uint32_t>(ip[17]) << 16) |
                     (std::to_integer<uint32_t>(ip[18]) << 8) |
                     std::to_integer<uint32_t>(ip[19]);
        pkt.payload_size = orig_len;

        const uint16_t frag = read_u16be(ip + 6);
        const bool first_fragment = (frag & 0x1fff) == 0;

        if (first_fragment &&
            (pkt.protocol == kProtoTcp || pkt.protocol == kProtoUdp)) {
            const std::byte* l4 = ip + ihl;
            const size_t l4_avail = ip_avail - ihl;
            const size_t need = pkt.protocol == kProtoTcp ? 20 : 8;
            if (l4_avail < need) {
                result.skipped++;  // snapped before the transport header
                continue;
            }
            pkt.src_port = read_u16be(l4);
            pkt.dst_port = read_u16be(l4 + 2);
            if (pkt.protocol == kProtoTcp) {
                pkt.tcp_flags = TcpFlags::from_bits(std::to_integer<uint8_t>(l4[13]));
            }
        }
        result.packets.push_back(pkt);
    }
    return result;
}

ParseResult parse_pcap_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<char> buf((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
    return parse_pcap(std::as_bytes(std::span<const char>(buf)));
}

std::vector<Flow> assemble_flows(std::span<const Packet> packets,
                                 const std::set<uint32_t>& monitored_src,
                                 double idle_timeout) {
    std::map<FlowKey, std::vector<Packet>> groups;
    for (const Packet& p : packets) {
        if (!monitored_src.contains(p.src_ip)) continue;
        groups[FlowKey::of(p)].push_back(p);
    }

    std::vector<Flow> flows;
    for (auto& [key, pkts] : groups) {
        // Capture order breaks timestamp ties.
        std::stable_sort(pkts.begin(), pkts.end(),
                         [](const Packet& a, const Packet& b) {
                             return a.timestamp < b.timestamp;
                         });
        std::vector<std::vector<Packet>> segments;
        if (idle_timeout > 0.0) {
            for (const Packet& p : pkts) {
                if (segments.empty() ||
                    p.timestamp - segments.back().back().timestamp > idle_timeout) {
                    segments.emplace_back();
                }
                segments.back().push_back(p);
            }
        } else {
            segments.push_back(std::move(pkts));
        }
        for (auto& seg : segments) {
            if (seg.size() < 2) continue;  // IAT undefined below 2 packets
            Flow f;
            f.key = key;
            f.packets = std::move(seg);
            flows.push_back(std::move(f));
        }
    }
    return flows;
}

double percentile(std::span<const double> values, double q) {
    if (values.empty()) throw EmptyInput("percentile of empty input");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const size_t n = sorted.size();
    size_t rank = static_cast<size_t>(std::ceil(q * static_cast<double>(n)));
    if (rank == 0) rank = 1;
    if (rank > n) rank = n;
    return sorted[rank - 1];
}

std::vector<Flow> truncate_flows(std::vector<Flow> flows, double max_duration) {
    std::vector<Flow> out;
    out.reserve(flows.size());
    for (Flow& f : flows) {
        const double t0 = f.packets.front().timestamp;
        auto keep_end = std::find_if(f.packets.begin(), f.packets.end(),
                                     [&](const Packet& p) {
                                         return p.timestamp - t0 > max_duration;
                                     });
        f.packets.erase(keep_end, f.packets.end());
        if (f.packets.size() >= 2) out.push_back(std::move(f));
    }
    return out;
}

int flow_length_percentile(std::span<const Flow> flows, double q) {
    if (flows.empty()) throw EmptyInput("flow_length_percentile of empty input");
    std::vector<double> counts;
    counts.reserve(flows.size());
    for (const Flow& f : flows) counts.push_back(static_cast<double>(f.size()));
    return static_cast<int>(percentile(counts, q));
}

double flow_duration_percentile(std::span<const Flow> flows, double q) {
    if (flows.empty()) throw EmptyInput("flow_duration_percentile of empty input");
    std::vector<double> durations;
    durations.reserve(flows.size());
    for (const Flow& f : flows) durations.push_back(f.duration());
    return percentile(durations, q);
}

}  // namespace flowrep
