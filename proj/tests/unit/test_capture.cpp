#include "flowrep/capture.hpp"

#include <gtest/gtest.h>

#include <cstddef>
#include <string>
#include <vector>

#include "flowrep/errors.hpp"

using namespace flowrep;

namespace {

std::vector<std::byte> from_hex(const std::string& hex) {
    std::vector<std::byte> out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i + 1 < hex.size(); i += 2) {
        out.push_back(static_cast<std::byte>(
            std::stoi(hex.substr(i, 2), nullptr, 16)));
    }
    return out;
}

// Reference captures produced with an independent pcap writer.
const char* kEmptyPcap = "d4c3b2a1020004000000000000000000ffff000001000000";

// One Ethernet/IPv4/TCP SYN packet, 74 bytes on wire, ts 1609459200.123456,
// 10.0.0.1:49152 -> 192.168.1.9:80, TTL 64.
const char* kSynPcap =
    "d4c3b2a1020004000000000000000000ffff0000010000000066ee5f40e201004a00"
    "00004a000000aabbccddeeff11223344556608004500003c1234400040065cd60a00"
    "0001c0a80109c0000050000003e8000000005002ffff000000000000000000000000"
    "000000000000000000000000";

// One ARP frame.
const char* kArpPcap =
    "d4c3b2a1020004000000000000000000ffff0000010000000166ee5f000000002a00"
    "00002a000000ffffffffffff11223344556608060000000000000000000000000000"
    "0000000000000000000000000000";

Packet make_packet(double ts, uint32_t src, uint32_t dst, uint16_t sport,
                   uint16_t dport, uint8_t proto = kProtoTcp) {
    Packet p;
    p.timestamp = ts;
    p.src_ip = src;
    p.dst_ip = dst;
    p.src_port = sport;
    p.dst_port = dport;
    p.protocol = proto;
    p.payload_size = 100;
    p.ttl = 64;
    return p;
}

}  // namespace

TEST(ParsePcap, EmptyCaptureYieldsNoPackets) {
    const auto bytes = from_hex(kEmptyPcap);
    const ParseResult r = parse_pcap(bytes);
    EXPECT_TRUE(r.packets.empty());
    EXPECT_EQ(r.skipped, 0u);
    EXPECT_EQ(r.truncated_records, 0u);
}

TEST(ParsePcap, TcpSynFieldByField) {
    const auto bytes = from_hex(kSynPcap);
    const ParseResult r = parse_pcap(bytes);
    ASSERT_EQ(r.packets.size(), 1u);
    const Packet& p = r.packets[0];
    EXPECT_NEAR(p.timestamp, 1609459200.123456, 1e-9);
    EXPECT_EQ(p.src_ip, parse_ipv4("10.0.0.1"));
    EXPECT_EQ(p.dst_ip, parse_ipv4("192.168.1.9"));
    EXPECT_EQ(p.src_port, 49152);
    EXPECT_EQ(p.dst_port, 80);
    EXPECT_EQ(p.protocol, kProtoTcp);
    EXPECT_EQ(p.payload_size, 74u);
    EXPECT_EQ(p.ttl, 64);
    EXPECT_TRUE(p.tcp_flags.syn);
    EXPECT_FALSE(p.tcp_flags.ack);
    EXPECT_FALSE(p.tcp_flags.fin);
    EXPECT_EQ(r.skipped, 0u);
}

TEST(ParsePcap, ArpFrameIsSkipped) {
    const auto bytes = from_hex(kArpPcap);
    const ParseResult r = parse_pcap(bytes);
    EXPECT_TRUE(r.packets.empty());
    EXPECT_EQ(r.skipped, 1u);
}

TEST(ParsePcap, BadMagicThrows) {
    auto bytes = from_hex(kEmptyPcap);
    bytes[0] = std::byte{0x00};
    EXPECT_THROW(parse_pcap(bytes), MalformedHeader);
}

TEST(ParsePcap, TruncatedGlobalHeaderThrows) {
    auto bytes = from_hex(kEmptyPcap);
    bytes.resize(10);
    EXPECT_THROW(parse_pcap(bytes), MalformedHeader);
}

TEST(ParsePcap, NonEthernetLinkTypeThrows) {
    auto bytes = from_hex(kEmptyPcap);
    bytes[20] = std::byte{101};  // raw IP
    EXPECT_THROW(parse_pcap(bytes), MalformedHeader);
}

TEST(ParsePcap, TruncatedRecordStopsWithPartialResult) {
    auto bytes = from_hex(kSynPcap);
    bytes.resize(bytes.size() - 10);  // record shorter than declared caplen
    const ParseResult r = parse_pcap(bytes);
    EXPECT_TRUE(r.packets.empty());
    EXPECT_EQ(r.truncated_records, 1u);
}

TEST(AssembleFlows, GroupsSameFiveTuple) {
    const uint32_t a = parse_ipv4("10.0.0.1");
    const uint32_t b = parse_ipv4("10.0.0.2");
    std::vector<Packet> pkts = {make_packet(0.0, a, b, 1000, 80),
                                make_packet(1.0, a, b, 1000, 80),
                                make_packet(2.0, a, b, 1000, 80)};
    const auto flows = assemble_flows(pkts, {a});
    ASSERT_EQ(flows.size(), 1u);
    EXPECT_EQ(flows[0].packets.size(), 3u);
}

TEST(AssembleFlows, ForwardDirectionOnly) {
    const uint32_t a = parse_ipv4("10.0.0.1");
    const uint32_t b = parse_ipv4("10.0.0.2");
    std::vector<Packet> pkts = {make_packet(0.0, a, b, 1000, 80),
                                make_packet(0.5, b, a, 80, 1000),
                                make_packet(1.0, a, b, 1000, 80),
                                make_packet(1.5, b, a, 80, 1000)};
    const auto flows = assemble_flows(pkts, {a});
    ASSERT_EQ(flows.size(), 1u);
    EXPECT_EQ(flows[0].key.src_ip, a);
    EXPECT_EQ(flows[0].packets.size(), 2u);
}

TEST(AssembleFlows, SinglePacketFlowDropped) {
    const uint32_t a = parse_ipv4("10.0.0.1");
    const uint32_t b = parse_ipv4("10.0.0.2");
    std::vector<Packet> pkts = {make_packet(0.0, a, b, 1234, 80)};
    EXPECT_TRUE(assemble_flows(pkts, {a}).empty());
}

TEST(AssembleFlows, OrderInvariantUpToTimestampTies) {
    const uint32_t a = parse_ipv4("10.0.0.1");
    const uint32_t b = parse_ipv4("10.0.0.2");
    std::vector<Packet> pkts;
    for (int i = 0; i < 10; ++i) {
        Packet p = make_packet(static_cast<double>(9 - i), a, b, 1000, 80);
        p.payload_size = static_cast<uint32_t>(100 + i);
        pkts.push_back(p);
    }
    const auto flows = assemble_flows(pkts, {a});
    ASSERT_EQ(flows.size(), 1u);
    for (size_t i = 1; i < flows[0].packets.size(); ++i) {
        EXPECT_LE(flows[0].packets[i - 1].timestamp, flows[0].packets[i].timestamp);
    }
    // Reversed input gives the same time-sorted flow.
    std::vector<Packet> rev(pkts.rbegin(), pkts.rend());
    const auto flows2 = assemble_flows(rev, {a});
    ASSERT_EQ(flows2.size(), 1u);
    for (size_t i = 0; i < flows[0].packets.size(); ++i) {
        EXPECT_EQ(flows[0].packets[i].payload_size, flows2[0].packets[i].payload_size);
    }
}

TEST(AssembleFlows, IdleTimeoutSplitsFlows) {
    const uint32_t a = parse_ipv4("10.0.0.1");
    const uint32_t b = parse_ipv4("10.0.0.2");
    std::vector<Packet> pkts = {make_packet(0.0, a, b, 1000, 80),
                                make_packet(1.0, a, b, 1000, 80),
                                make_packet(100.0, a, b, 1000, 80),
                                make_packet(101.0, a, b, 1000, 80)};
    EXPECT_EQ(assemble_flows(pkts, {a}).size(), 1u);
    EXPECT_EQ(assemble_flows(pkts, {a}, 10.0).size(), 2u);
}

TEST(Percentile, NearestRank) {
    const std::vector<double> single = {5.0};
    EXPECT_DOUBLE_EQ(percentile(single, 0.9), 5.0);

    std::vector<double> ten;
    for (int i = 1; i <= 10; ++i) ten.push_back(i);
    EXPECT_DOUBLE_EQ(percentile(ten, 0.9), 9.0);

    const std::vector<double> unsorted = {2, 7, 1, 9, 4};
    EXPECT_DOUBLE_EQ(percentile(unsorted, 0.5), 4.0);
}

TEST(Percentile, ReturnsAMember) {
    const std::vector<double> values = {0.1, 2.7, 3.14, 9.5, 12.0, 100.0, 7.0};
    for (double q : {0.01, 0.25, 0.5, 0.75, 0.9, 1.0}) {
        const double v = percentile(values, q);
        EXPECT_NE(std::find(values.begin(), values.end(), v), values.end());
    }
}

TEST(Percentile, EmptyInputThrows) {
    EXPECT_THROW(percentile({}, 0.5), EmptyInput);
}

TEST(TruncateFlows, DropsLatePackets) {
    const uint32_t a = parse_ipv4("10.0.0.1");
    const uint32_t b = parse_ipv4("10.0.0.2");
    Flow f;
    f.key = {a, 1000, b, 80, kProtoTcp};
    f.packets = {make_packet(0.0, a, b, 1000, 80), make_packet(1.0, a, b, 1000, 80),
                 make_packet(5.0, a, b, 1000, 80)};
    auto out = truncate_flows({f}, 2.0);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].packets.size(), 2u);
    EXPECT_LE(out[0].duration(), 2.0);
}

TEST(TruncateFlows, WithinBudgetUnchanged) {
    const uint32_t a = parse_ipv4("10.0.0.1");
    const uint32_t b = parse_ipv4("10.0.0.2");
    Flow f;
    f.key = {a, 1000, b, 80, kProtoTcp};
    f.packets = {make_packet(0.0, a, b, 1000, 80), make_packet(1.0, a, b, 1000, 80)};
    auto out = truncate_flows({f}, 10.0);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].packets.size(), 2u);
}

TEST(TruncateFlows, DropsFlowsBelowTwoPackets) {
    const uint32_t a = parse_ipv4("10.0.0.1");
    const uint32_t b = parse_ipv4("10.0.0.2");
    Flow f;
    f.key = {a, 1000, b, 80, kProtoTcp};
    f.packets = {make_packet(0.0, a, b, 1000, 80), make_packet(3.0, a, b, 1000, 80),
                 make_packet(4.0, a, b, 1000, 80)};
    EXPECT_TRUE(truncate_flows({f}, 2.0).empty());
}

TEST(FlowLengthPercentile, MatchesNearestRank) {
    const uint32_t a = parse_ipv4("10.0.0.1");
    const uint32_t b = parse_ipv4("10.0.0.2");
    auto flow_of = [&](int n_pkts, uint16_t port) {
        Flow f;
        f.key = {a, port, b, 80, kProtoTcp};
        for (int i = 0; i < n_pkts; ++i) {
            f.packets.push_back(make_packet(i, a, b, port, 80));
        }
        return f;
    };
    std::vector<Flow> flows = {flow_of(15, 1), flow_of(15, 2), flow_of(15, 3)};
    EXPECT_EQ(flow_length_percentile(flows, 0.90), 15);

    std::vector<Flow> one = {flow_of(8, 1)};
    EXPECT_EQ(flow_length_percentile(one, 0.90), 8);

    std::vector<Flow> mixed = {flow_of(2, 1), flow_of(4, 2), flow_of(6, 3),
                               flow_of(8, 4), flow_of(10, 5)};
    EXPECT_EQ(flow_length_percentile(mixed, 0.90), 10);
}
