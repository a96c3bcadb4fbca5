#include <cstdint>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "flowrep/manifest.hpp"
#include "flowrep/runner.hpp"
#include "flowrep/synth.hpp"

namespace {

struct CommonOpts {
    std::string manifest_path;
    int64_t seed_override = -1;
    std::string tuning;
    int jobs = 0;
};

flowrep::Manifest load_with_overrides(const CommonOpts& opts) {
    flowrep::Manifest manifest = flowrep::load_manifest(opts.manifest_path);
    if (opts.seed_override >= 0) {
        manifest.seed = static_cast<uint64_t>(opts.seed_override);
    }
    if (!opts.tuning.empty()) {
        manifest.tuning = flowrep::tuning_mode_from_string(opts.tuning);
    }
    return manifest;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--manifest", opts.manifest_path, "Experiment manifest (JSON)")
        ->required();
    cmd->add_option("--seed", opts.seed_override, "Override the manifest seed");
    cmd->add_option("--tuning", opts.tuning, "opt, default, or both")
        ->check(CLI::IsMember({"opt", "default", "both"}));
    cmd->add_option("--jobs", opts.jobs,
                    "Worker threads (0 = hardware concurrency); never changes results");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Network-flow representation benchmark for novelty detection"};
    app.require_subcommand(1);

    CommonOpts extract_opts, features_opts, evaluate_opts;
    auto* extract = app.add_subcommand("extract", "Parse pcaps into truncated flow stores");
    add_common(extract, extract_opts);
    auto* features = app.add_subcommand("features", "Write feature matrices as CSV");
    add_common(features, features_opts);
    auto* evaluate =
        app.add_subcommand("evaluate", "Train detectors and report AUC tables");
    add_common(evaluate, evaluate_opts);

    std::string scenario = "ddos-syn";
    uint64_t synth_seed = 1;
    std::string synth_out = "synth";
    int n_train = 800, n_test_normal = 200, n_test_novel = 200;
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic pcap pair");
    synth->add_option("--scenario", scenario, "ddos-syn, new-device, or new-activity")
        ->check(CLI::IsMember(flowrep::scenario_names()));
    synth->add_option("--seed", synth_seed, "Generator seed");
    synth->add_option("--out", synth_out, "Output directory");
    synth->add_option("--train-flows", n_train, "Training flow count");
    synth->add_option("--test-normal-flows", n_test_normal, "Normal test flow count");
    synth->add_option("--test-novel-flows", n_test_novel, "Novel test flow count");

    std::string model_path, features_path, scores_out = "scores.csv";
    auto* score = app.add_subcommand("score", "Score a feature CSV with a saved model");
    score->add_option("--model", model_path, "Model JSON")->required();
    score->add_option("--features", features_path, "Feature CSV")->required();
    score->add_option("--out", scores_out, "Output CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (extract->parsed()) {
            return flowrep::run_extract(load_with_overrides(extract_opts)) == 0 ? 0 : 1;
        }
        if (features->parsed()) {
            return flowrep::run_features(load_with_overrides(features_opts)) == 0 ? 0 : 1;
        }
        if (evaluate->parsed()) {
            int jobs = evaluate_opts.jobs;
            if (jobs <= 0) {
                jobs = static_cast<int>(std::thread::hardware_concurrency());
                if (jobs <= 0) jobs = 1;
            }
            const auto out =
                flowrep::run_evaluate(load_with_overrides(evaluate_opts), jobs);
            return out.failed_cells == 0 ? 0 : 1;
        }
        if (synth->parsed()) {
            const auto manifest = flowrep::run_synth(scenario, synth_seed, synth_out,
                                                     n_train, n_test_normal, n_test_novel);
            std::cout << manifest.string() << "\n";
            return 0;
        }
        if (score->parsed()) {
            flowrep::run_score(model_path, features_path, scores_out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
