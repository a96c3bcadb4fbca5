#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace flowrep {

inline constexpr uint8_t kProtoTcp = 6;
inline constexpr uint8_t kProtoUdp = 17;

enum class Label { Normal, Novel, Unlabeled };

std::string to_string(Label label);
Label label_from_string(const std::string& s);

/// TCP flag bits of a packet. All false for non-TCP packets.
struct TcpFlags {
    bool fin = false;
    bool syn = false;
    bool rst = false;
    bool psh = false;
    bool ack = false;
    bool urg = false;
    bool ece = false;
    bool cwr = false;

    /// On-wire TCP flag byte (FIN = bit 0 ... CWR = bit 7).
    uint8_t bits() const;
    static TcpFlags from_bits(uint8_t bits);

    bool operator==(const TcpFlags&) const = default;
};

/// One captured datagram. IP addresses and ports are host byte order.
struct Packet {
    double timestamp = 0.0;  // seconds since capture epoch
    uint32_t src_ip = 0;
    uint32_t dst_ip = 0;
    uint16_t src_port = 0;  // 0 for non-TCP/UDP
    uint16_t dst_port = 0;
    uint8_t protocol = 0;       // IP protocol number
    uint32_t payload_size = 0;  // bytes on wire (pcap original length)
    uint8_t ttl = 0;
    TcpFlags tcp_flags;
};

/// Five-tuple flow identifier with a total ordering.
struct FlowKey {
    uint32_t src_ip = 0;
    uint16_t src_port = 0;
    uint32_t dst_ip = 0;
    uint16_t dst_port = 0;
    uint8_t protocol = 0;

    auto operator<=>(const FlowKey&) const = default;

    static FlowKey of(const Packet& p);
};

/// Time-ordered packets sharing one five-tuple (forward direction).
struct Flow {
    FlowKey key;
    std::vector<Packet> packets;
    Label label = Label::Unlabeled;

    double duration() const;
    size_t size() const { return packets.size(); }
};

/// Parse dotted-quad IPv4 into a host-order word. Throws on malformed input.
uint32_t parse_ipv4(const std::string& s);
std::string format_ipv4(uint32_t addr);

}  // namespace flowrep
