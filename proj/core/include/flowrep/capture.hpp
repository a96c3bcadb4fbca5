#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <vector>

#include "flowrep/types.hpp"

namespace flowrep {

/// Outcome of parsing one capture. `skipped` counts non-IPv4 frames and
/// frames whose declared headers do not fit in the captured bytes;
/// `truncated_records` is nonzero when a record was shorter than its
/// declared capture length and parsing stopped early.
struct ParseResult {
    std::vector<Packet> packets;
    uint64_t skipped = 0;
    uint64_t truncated_records = 0;
};

/// Parse a classic pcap byte stream (magic 0xa1b2c3d4 / byte-swapped /
/// 0xa1b23c4d nanosecond variant), link type Ethernet. Throws
/// MalformedHeader on a bad magic, truncated global header, or non-Ethernet
/// link type. A record truncated mid-stream stops parsing and returns the
/// packets seen so far.
ParseResult parse_pcap(std::span<const std::byte> data);
ParseResult parse_pcap_file(const std::filesystem::path& path);

/// Group packets whose source is monitored into forward flows, one per
/// five-tuple. Packets are time-sorted within each flow (capture order
/// breaks ties), flows with fewer than 2 packets are dropped, output is
/// ordered by FlowKey. With idle_timeout > 0, a gap longer than the timeout
/// starts a new flow on the same five-tuple.
std::vector<Flow> assemble_flows(std::span<const Packet> packets,
                                 const std::set<uint32_t>& monitored_src,
                                 double idle_timeout = 0.0);

/// Nearest-rank percentile: sort ascending, return the element at index
/// ceil(q*n)-1. Throws EmptyInput.
double percentile(std::span<const double> values, double q);

/// Drop packets arriving later than max_duration after each flow's first
/// packet; flows left with fewer than 2 packets are dropped.
std::vector<Flow> truncate_flows(std::vector<Flow> flows, double max_duration);

/// Nearest-rank percentile of per-flow packet counts (the dimension anchor
/// d0). Throws EmptyInput.
int flow_length_percentile(std::span<const Flow> flows, double q = 0.90);

/// Nearest-rank percentile of flow durations (the truncation budget).
double flow_duration_percentile(std::span<const Flow> flows, double q = 0.90);

}  // namespace flowrep
