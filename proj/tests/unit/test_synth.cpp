#include "flowrep/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "flowrep/capture.hpp"
#include "flowrep/errors.hpp"

using namespace flowrep;

namespace {

TrafficProfile small_profile(int n_flows = 5) {
    TrafficProfile p;
    p.n_flows = n_flows;
    p.pkts_min = 5;
    p.pkts_max = 5;
    p.iat = {IatDist::Kind::Exponential, 4.0, 0, 0};
    p.size = {300.0, 60.0, 40.0, 1500.0};
    p.ttl = {64.0, 0.0};
    p.flags.prob = {0.05, 0.2, 0.0, 0.3, 0.8, 0.0, 0.0, 0.0};
    p.label = Label::Normal;
    return p;
}

}  // namespace

TEST(Generate, FixedPacketCountPerFlow) {
    const auto result = generate(std::vector<TrafficProfile>{small_profile(7)}, 11);
    std::set<uint32_t> srcs(result.monitored_src.begin(), result.monitored_src.end());
    const auto flows = assemble_flows(result.packets, srcs);
    ASSERT_EQ(flows.size(), 7u);
    for (const Flow& f : flows) EXPECT_EQ(f.packets.size(), 5u);
}

TEST(Generate, SameSeedSamePcapBytes) {
    const std::vector<TrafficProfile> profiles{small_profile(10)};
    const auto a = encode_pcap(generate(profiles, 99).packets);
    const auto b = encode_pcap(generate(profiles, 99).packets);
    EXPECT_EQ(a, b);
    const auto c = encode_pcap(generate(profiles, 100).packets);
    EXPECT_NE(a, c);
}

TEST(Generate, EmpiricalSizeMeanWithinThreeStdErrors) {
    TrafficProfile p = small_profile(1000);
    p.pkts_min = 10;
    p.pkts_max = 10;
    p.size = {700.0, 80.0, 40.0, 1500.0};
    const auto result = generate(std::vector<TrafficProfile>{p}, 5);
    double sum = 0.0;
    for (const Packet& pkt : result.packets) sum += pkt.payload_size;
    const double n = static_cast<double>(result.packets.size());
    ASSERT_GE(n, 10000.0);
    const double mean = sum / n;
    const double stderr_bound = 3.0 * 80.0 / std::sqrt(n);
    EXPECT_NEAR(mean, 700.0, stderr_bound + 0.5);  // +0.5 for integer rounding
}

TEST(Generate, UniqueFiveTuplesPerFlow) {
    const auto result = generate(std::vector<TrafficProfile>{small_profile(50)}, 3);
    std::set<uint32_t> srcs(result.monitored_src.begin(), result.monitored_src.end());
    const auto flows = assemble_flows(result.packets, srcs);
    std::set<FlowKey> keys;
    for (const Flow& f : flows) keys.insert(f.key);
    EXPECT_EQ(keys.size(), 50u);
}

TEST(Generate, InvalidProfileRejected) {
    TrafficProfile p = small_profile();
    p.pkts_min = 1;
    EXPECT_THROW(generate(std::vector<TrafficProfile>{p}, 1), InvalidProfile);

    p = small_profile();
    p.iat.rate = -1.0;
    EXPECT_THROW(generate(std::vector<TrafficProfile>{p}, 1), InvalidProfile);

    p = small_profile();
    p.flags.prob[1] = 1.5;
    EXPECT_THROW(generate(std::vector<TrafficProfile>{p}, 1), InvalidProfile);
}

TEST(EmitPcap, RoundTripsAllPacketFields) {
    const auto result = generate(std::vector<TrafficProfile>{small_profile(6)}, 21);
    const auto bytes = encode_pcap(result.packets);
    const ParseResult parsed = parse_pcap(bytes);
    ASSERT_EQ(parsed.packets.size(), result.packets.size());
    EXPECT_EQ(parsed.skipped, 0u);
    for (size_t i = 0; i < parsed.packets.size(); ++i) {
        const Packet& in = result.packets[i];
        const Packet& out = parsed.packets[i];
        EXPECT_DOUBLE_EQ(out.timestamp, in.timestamp);
        EXPECT_EQ(out.src_ip, in.src_ip);
        EXPECT_EQ(out.dst_ip, in.dst_ip);
        EXPECT_EQ(out.src_port, in.src_port);
        EXPECT_EQ(out.dst_port, in.dst_port);
        EXPECT_EQ(out.protocol, in.protocol);
        EXPECT_EQ(out.payload_size, in.payload_size);
        EXPECT_EQ(out.ttl, in.ttl);
        EXPECT_EQ(out.tcp_flags, in.tcp_flags);
    }
}

TEST(EmitPcap, EmptyPacketListIsHeaderOnlyValidFile) {
    const auto bytes = encode_pcap({});
    EXPECT_EQ(bytes.size(), 24u);
    const ParseResult parsed = parse_pcap(bytes);
    EXPECT_TRUE(parsed.packets.empty());
}

TEST(EmitPcap, TcpFlagBitsPreservedExactly) {
    std::vector<Packet> pkts;
    for (int bits = 0; bits < 256; bits += 37) {
        Packet p;
        p.timestamp = 1.0 + bits * 0.001;
        p.src_ip = parse_ipv4("10.0.0.1");
        p.dst_ip = parse_ipv4("10.0.0.2");
        p.src_port = 1000;
        p.dst_port = 80;
        p.protocol = kProtoTcp;
        p.payload_size = 60;
        p.ttl = 63;
        p.tcp_flags = TcpFlags::from_bits(static_cast<uint8_t>(bits));
        pkts.push_back(p);
    }
    const ParseResult parsed = parse_pcap(encode_pcap(pkts));
    ASSERT_EQ(parsed.packets.size(), pkts.size());
    for (size_t i = 0; i < pkts.size(); ++i) {
        EXPECT_EQ(parsed.packets[i].tcp_flags.bits(), pkts[i].tcp_flags.bits());
    }
}

TEST(EmitPcap, GenerateEmitParseAssembleRecoversFlowStructure) {
    TrafficProfile p = small_profile(40);
    p.pkts_min = 3;
    p.pkts_max = 12;
    const auto result = generate(std::vector<TrafficProfile>{p}, 77);
    std::set<uint32_t> srcs(result.monitored_src.begin(), result.monitored_src.end());

    const auto direct = assemble_flows(result.packets, srcs);
    const ParseResult parsed = parse_pcap(encode_pcap(result.packets));
    const auto roundtrip = assemble_flows(parsed.packets, srcs);

    ASSERT_EQ(direct.size(), roundtrip.size());
    for (size_t i = 0; i < direct.size(); ++i) {
        EXPECT_EQ(direct[i].key, roundtrip[i].key);
        EXPECT_EQ(direct[i].packets.size(), roundtrip[i].packets.size());
    }
}

TEST(Scenarios, AllNamedScenariosGenerate) {
    for (const std::string& name : scenario_names()) {
        const Scenario s = make_scenario(name, 20, 10, 10);
        EXPECT_FALSE(s.train.empty());
        EXPECT_FALSE(s.test_normal.empty());
        EXPECT_FALSE(s.test_novel.empty());
        for (const auto& prof : s.test_novel) EXPECT_EQ(prof.label, Label::Novel);
        const auto packets = generate(s.train, 1).packets;
        EXPECT_FALSE(packets.empty());
    }
    EXPECT_THROW(make_scenario("nope"), InvalidProfile);
}
