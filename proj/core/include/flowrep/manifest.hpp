#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "flowrep/detect/common.hpp"
#include "flowrep/eval.hpp"
#include "flowrep/represent.hpp"
#include "flowrep/types.hpp"

namespace flowrep {

/// Traffic source: an on-disk pcap, or one part of a built-in synthetic
/// scenario generated on the fly.
struct PcapSource {
    std::filesystem::path path;
};

struct SynthSource {
    std::string scenario;
    std::string part;  // "train" | "test-normal" | "test-novel"
    uint64_t seed = 0;
    int n_flows = 0;  // 0 = scenario default
};

struct TrafficSource {
    std::variant<PcapSource, SynthSource> source;
    Label label = Label::Normal;
};

struct DatasetSpec {
    std::string name;
    std::vector<TrafficSource> train_files;  // label normal
    std::vector<TrafficSource> test_files;   // labeled normal/novel
    std::vector<uint32_t> monitored_src;
};

struct ReprSelector {
    ReprKind kind = ReprKind::Stats;
    bool fft = false;
    bool header = false;
};

enum class TuningMode { Opt, Default, Both };

TuningMode tuning_mode_from_string(const std::string& s);
std::string to_string(TuningMode mode);

struct Manifest {
    int schema = 1;
    uint64_t seed = 0;
    std::filesystem::path output_dir = "out";
    TuningMode tuning = TuningMode::Opt;
    std::vector<DatasetSpec> datasets;
    std::vector<ReprSelector> representations;
    std::vector<Family> detectors;
    double idle_timeout = 0.0;  // 0 = off
    bool save_models = false;
    DetectOptions detect;
};

/// Parse and validate a schema-1 JSON manifest. Throws ManifestError.
Manifest load_manifest(const std::filesystem::path& path);
Manifest parse_manifest(const std::string& text,
                        const std::filesystem::path& base_dir = ".");

}  // namespace flowrep
