#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "flowrep/represent.hpp"
#include "flowrep/types.hpp"

namespace flowrep {

std::string csv_escape(const std::string& field);

/// Shortest round-trip decimal for a double ("%.17g" pruned), so identical
/// numbers always print identically.
std::string format_double(double v);

/// Feature matrix as CSV: feature-name header plus a final `label` column.
void write_feature_csv(const FeatureMatrix& m, const std::filesystem::path& path);

struct FeatureCsv {
    std::vector<std::string> names;
    Eigen::MatrixXd rows;
    std::vector<Label> labels;
};

FeatureCsv read_feature_csv(const std::filesystem::path& path);

/// Flow store: per-packet rows (flow_id, ts, size, ttl, flags, label) with
/// flow ids assigned in flow order. `flags` is the on-wire TCP flag byte.
void write_flow_store(std::span<const Flow> flows, const std::filesystem::path& path);
std::vector<Flow> read_flow_store(const std::filesystem::path& path);

}  // namespace flowrep
