#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "flowrep/types.hpp"

namespace flowrep {

struct IatDist {
    enum class Kind { Exponential, Uniform };
    Kind kind = Kind::Exponential;
    double rate = 1.0;  // Exponential
    double lo = 0.0;    // Uniform bounds
    double hi = 1.0;
};

/// Normal packet-size distribution, clipped to [lo, hi] bytes on wire. The
/// emitter additionally raises sizes to the protocol's minimum frame so the
/// headers always fit.
struct SizeDist {
    double mean = 500.0;
    double std = 100.0;
    double lo = 40.0;
    double hi = 1500.0;
};

struct TtlSpec {
    double mean = 64.0;
    double std = 0.0;  // 0 = constant
};

/// Independent per-packet set probabilities, FIN..CWR order.
struct FlagProfile {
    std::array<double, 8> prob{};
};

struct TrafficProfile {
    int n_flows = 0;
    int pkts_min = 2;
    int pkts_max = 2;
    IatDist iat;
    SizeDist size;
    TtlSpec ttl;
    FlagProfile flags;
    Label label = Label::Normal;
    uint8_t protocol = kProtoTcp;
    uint32_t src_ip = 0;  // 0 = allocate from the reserved pool
};

struct SynthResult {
    std::vector<Packet> packets;  // capture (time) order
    std::vector<uint32_t> monitored_src;
};

/// Deterministic for a given seed. Each flow gets a unique five-tuple from
/// a reserved 10.77.0.0/16 pool; timestamps are quantized to microseconds so
/// a pcap round trip is exact. Throws InvalidProfile.
SynthResult generate(std::span<const TrafficProfile> profiles, uint64_t seed);

/// Classic pcap bytes: magic 0xa1b2c3d4, microsecond timestamps, Ethernet
/// framing, incl_len == orig_len == payload_size.
std::vector<std::byte> encode_pcap(std::span<const Packet> packets);
void emit_pcap(std::span<const Packet> packets, const std::filesystem::path& path);

/// A built-in scenario is three profile sets: train (normal only),
/// test-normal, test-novel.
struct Scenario {
    std::string name;
    std::vector<TrafficProfile> train;
    std::vector<TrafficProfile> test_normal;
    std::vector<TrafficProfile> test_novel;
};

/// Named scenarios: "ddos-syn" (novel = high-rate small SYN-heavy packets),
/// "new-device" (novel = shifted TTL and size distribution),
/// "new-activity" (novel = shifted IAT/ACK profile).
Scenario make_scenario(const std::string& name, int n_train = 800,
                       int n_test_normal = 200, int n_test_novel = 200);

std::vector<std::string> scenario_names();

}  // namespace flowrep
