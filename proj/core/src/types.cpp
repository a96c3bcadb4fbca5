#include "flowrep/types.hpp"

#include <cstdio>

#include "flowrep/errors.hpp"

namespace flowrep {

std::string to_string(Label label) {
    switch (label) {
        case Label::Normal: return "normal";
        case Label::Novel: return "novel";
        case Label::Unlabeled: return "unlabeled";
    }
    return "unlabeled";
}

Label label_from_string(const std::string& s) {
    if (s == "normal") return Label::Normal;
    if (s == "novel") return Label::Novel;
    if (s == "unlabeled") return Label::Unlabeled;
    throw Error("unknown label: " + s);
}

uint8_t TcpFlags::bits() const {
    uint8_t b = 0;
    if (fin) b |= 0x01;
    if (syn) b |= 0x02;
    if (rst) b |= 0x04;
    if (psh) b |= 0x08;
    if (ack) b |= 0x10;
    if (urg) b |= 0x20;
    if (ece) b |= 0x40;
    if (cwr) b |= 0x80;
    return b;
}

TcpFlags TcpFlags::from_bits(uint8_t bits) {
    TcpFlags f;
    f.fin = bits & 0x01;
    f.syn = bits & 0x02;
    f.rst = bits & 0x04;
    f.psh = bits & 0x08;
    f.ack = bits & 0x10;
    f.urg = bits & 0x20;
    f.ece = bits & 0x40;
    f.cwr = bits & 0x80;
    return f;
}

FlowKey FlowKey::of(const Packet& p) {
    return FlowKey{p.src_ip, p.src_port, p.dst_ip, p.dst_port, p.protocol};
}

double Flow::duration() const {
    if (packets.empty()) return 0.0;
    return packets.back().timestamp - packets.front().timestamp;
}

uint32_t parse_ipv4(const std::string& s) {
    unsigned a, b, c, d;
    char tail;
    if (std::sscanf(s.c_str(), "%u.%u.%u.%u%c", &a, &b, &c, &d, &tail) != 4 ||
        a > 255 || b > 255 || c > 255 || d > 255) {
        throw Error("malformed IPv4 address: " + s);
    }
    return (a << 24) | (b << 16) | (c << 8) | d;
}

std::string format_ipv4(uint32_t addr) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (addr >> 24) & 0xff,
                  (addr >> 16) & 0xff, (addr >> 8) & 0xff, addr & 0xff);
    return buf;
}

}  // namespace flowrep
