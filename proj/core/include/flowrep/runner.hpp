#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flowrep/eval.hpp"
#include "flowrep/manifest.hpp"
#include "flowrep/synth.hpp"

namespace flowrep {

/// A dataset after extraction: assembled, duration-truncated flows plus the
/// dimension anchors computed from the training flows.
struct ExtractedDataset {
    std::string name;
    std::vector<Flow> train;
    std::vector<Flow> test;
    DatasetMeta meta;
};

ExtractedDataset extract_dataset(const DatasetSpec& spec, uint64_t seed,
                                 double idle_timeout);

/// `extract`: flow store CSV + meta JSON per dataset under
/// output_dir/flows/. Returns the number of datasets that failed.
int run_extract(const Manifest& manifest);

/// `features`: raw feature matrices as CSV per (dataset, representation)
/// under output_dir/features/ (one file per delta-t candidate for SAMP).
int run_features(const Manifest& manifest);

struct EvaluateOutput {
    EvalReport report;
    DeltaTables deltas;
    // Per dataset: ranked (feature, r) correlations on the test split.
    std::map<std::string, std::vector<std::pair<std::string, double>>> correlations;
    int failed_cells = 0;
};

/// `evaluate`: fill every (dataset x representation x detector x tuning)
/// cell, then emit report CSV/JSON, delta tables, correlations and SVG
/// charts under output_dir. jobs <= 1 runs serially; results are identical
/// for any job count.
EvaluateOutput run_evaluate(const Manifest& manifest, int jobs = 1);

/// `synth`: write <scenario>.{train,test-normal,test-novel}.pcap plus a
/// ready-to-run manifest stub into out_dir.
std::filesystem::path run_synth(const std::string& scenario, uint64_t seed,
                                const std::filesystem::path& out_dir,
                                int n_train = 800, int n_test_normal = 200,
                                int n_test_novel = 200);

/// `score`: apply a saved model to a feature CSV; writes score per row.
void run_score(const std::filesystem::path& model_path,
               const std::filesystem::path& features_csv,
               const std::filesystem::path& out_csv);

}  // namespace flowrep
