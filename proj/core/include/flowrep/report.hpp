#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "flowrep/eval.hpp"

namespace flowrep {

/// One row per cell: dataset, representation, fft, header, detector,
/// tuning, hyper, delta_t, auc, error_bar, status.
void write_report_csv(const EvalReport& report, const std::filesystem::path& path);
std::string report_csv_string(const EvalReport& report);

void write_report_json(const EvalReport& report, const std::filesystem::path& path);

void write_delta_csv(const std::vector<DeltaRow>& rows, const std::filesystem::path& path);

void write_delta_svg(const std::string& title, const std::vector<DeltaRow>& rows,
                     const std::filesystem::path& path);

void write_correlations_csv(
    const std::map<std::string, std::vector<std::pair<std::string, double>>>& by_dataset,
    const std::filesystem::path& path);

}  // namespace flowrep
