#include "flowrep/runner.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <thread>

#include "flowrep/capture.hpp"
#include "flowrep/errors.hpp"
#include "flowrep/io/csv.hpp"
#include "flowrep/report.hpp"
#include "flowrep/rng.hpp"
#include "json.hpp"

namespace flowrep {

namespace {

uint64_t part_tag(const std::string& part) {
    if (part == "train") return 1;
    if (part == "test-normal") return 2;
    if (part == "test-novel") return 3;
    throw ManifestError("unknown synth part: " + part);
}

SynthResult materialize_synth(const SynthSource& src, uint64_t manifest_seed) {
    Scenario scenario = make_scenario(src.scenario);
    std::vector<TrafficProfile>* profiles = nullptr;
    if (src.part == "train") profiles = &scenario.train;
    else if (src.part == "test-normal") profiles = &scenario.test_normal;
    else if (src.part == "test-novel") profiles = &scenario.test_novel;
    else throw ManifestError("unknown synth part: " + src.part);
    if (src.n_flows > 0) {
        for (auto& p : *profiles) p.n_flows = src.n_flows;
    }
    const uint64_t base = src.seed != 0 ? src.seed : manifest_seed;
    return generate(*profiles, mix_seed(base, part_tag(src.part)));
}

std::vector<Flow> load_source_flows(const TrafficSource& src,
                                    const DatasetSpec& spec, uint64_t manifest_seed,
                                    double idle_timeout) {
    std::vector<Packet> packets;
    std::set<uint32_t> monitored(spec.monitored_src.begin(), spec.monitored_src.end());

    if (const auto* pcap = std::get_if<PcapSource>(&src.source)) {
        if (monitored.empty()) {
            throw ManifestError("dataset " + spec.name +
                                " uses pcap sources but lists no monitored_src");
        }
        ParseResult parsed = parse_pcap_file(pcap->path);
        if (parsed.truncated_records > 0) {
            std::cerr << "warning: " << pcap->path.string()
                      << ": truncated record, parsed " << parsed.packets.size()
                      << " packets\n";
        }
        packets = std::move(parsed.packets);
    } else {
        SynthResult synth = materialize_synth(std::get<SynthSource>(src.source),
                                              manifest_seed);
        packets = std::move(synth.packets);
        if (monitored.empty()) {
            monitored.insert(synth.monitored_src.begin(), synth.monitored_src.end());
        }
    }

    std::vector<Flow> flows = assemble_flows(packets, monitored, idle_timeout);
    for (Flow& f : flows) f.label = src.label;
    return flows;
}

}  // namespace

ExtractedDataset extract_dataset(const DatasetSpec& spec, uint64_t seed,
                                 double idle_timeout) {
    ExtractedDataset ds;
    ds.name = spec.name;
    for (const TrafficSource& src : spec.train_files) {
        auto flows = load_source_flows(src, spec, seed, idle_timeout);
        ds.train.insert(ds.train.end(), std::make_move_iterator(flows.begin()),
                        std::make_move_iterator(flows.end()));
    }
    for (const TrafficSource& src : spec.test_files) {
        auto flows = load_source_flows(src, spec, seed, idle_timeout);
        ds.test.insert(ds.test.end(), std::make_move_iterator(flows.begin()),
                       std::make_move_iterator(flows.end()));
    }
    if (ds.train.empty()) throw EmptyInput("dataset " + spec.name + ": no training flows");
    if (ds.test.empty()) throw EmptyInput("dataset " + spec.name + ": no test flows");

    // Truncation budget and d0 come from the training flows only.
    ds.meta.duration_cap = flow_duration_percentile(ds.train, 0.90);
    ds.train = truncate_flows(std::move(ds.train), ds.meta.duration_cap);
    ds.test = truncate_flows(std::move(ds.test), ds.meta.duration_cap);
    if (ds.train.empty()) throw EmptyInput("dataset " + spec.name + ": truncation dropped all training flows");
    if (ds.test.empty()) throw EmptyInput("dataset " + spec.name + ": truncation dropped all test flows");

    ds.meta.d0 = std::max(flow_length_percentile(ds.train, 0.90), 2);
    ds.meta.delta_t_candidates =
        delta_t_candidates(ds.train, std::max(ds.meta.d0 - 1, 1));
    ds.meta.n_train_flows = static_cast<int>(ds.train.size());
    ds.meta.n_test_flows = static_cast<int>(ds.test.size());
    return ds;
}

namespace {

void write_dataset_meta(const ExtractedDataset& ds, const std::filesystem::path& path) {
    nlohmann::json meta = {{"dataset", ds.name},
                           {"d0", ds.meta.d0},
                           {"duration_cap", ds.meta.duration_cap},
                           {"delta_t_candidates", ds.meta.delta_t_candidates},
                           {"n_train_flows", ds.meta.n_train_flows},
                           {"n_test_flows", ds.meta.n_test_flows}};
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << meta.dump(2) << "\n";
}

}  // namespace

int run_extract(const Manifest& manifest) {
    const auto dir = manifest.output_dir / "flows";
    std::filesystem::create_directories(dir);
    int failures = 0;
    for (const DatasetSpec& spec : manifest.datasets) {
        try {
            ExtractedDataset ds = extract_dataset(spec, manifest.seed, manifest.idle_timeout);
            std::vector<Flow> all = ds.train;
            all.insert(all.end(), ds.test.begin(), ds.test.end());
            write_flow_store(all, dir / (ds.name + ".flows.csv"));
            write_dataset_meta(ds, dir / (ds.name + ".meta.json"));
        } catch (const std::exception& e) {
            std::cerr << "extract failed for dataset " << spec.name << ": " << e.what()
                      << "\n";
            failures++;
        }
    }
    return failures;
}

namespace {

struct MatrixPair {
    FeatureMatrix train;
    FeatureMatrix test;
};

MatrixPair build_pair(const ExtractedDataset& ds, const RepresentationSpec& spec) {
    MatrixPair pair;
    pair.train = build_matrix(ds.train, spec);
    pair.test = build_matrix(ds.test, spec);
    standardize_fit(pair.train);
    standardize_apply(pair.test, pair.train.standardization);
    return pair;
}

bool is_samp(ReprKind kind) {
    return kind == ReprKind::SampNum || kind == ReprKind::SampSize;
}

RepresentationSpec spec_for(const ReprSelector& sel, const DatasetMeta& meta,
                            int dt_index) {
    RepresentationSpec spec;
    spec.kind = sel.kind;
    spec.fft = sel.fft;
    spec.with_header = sel.header;
    spec.d0 = meta.d0;
    if (is_samp(sel.kind)) {
        spec.delta_t = meta.delta_t_candidates[static_cast<size_t>(dt_index)];
        if (!(spec.delta_t > 0.0)) spec.delta_t = 1e-6;  // all-zero durations
    }
    return spec;
}

}  // namespace

int run_features(const Manifest& manifest) {
    const auto dir = manifest.output_dir / "features";
    int failures = 0;
    for (const DatasetSpec& dspec : manifest.datasets) {
        try {
            ExtractedDataset ds = extract_dataset(dspec, manifest.seed, manifest.idle_timeout);
            const auto out = dir / ds.name;
            std::filesystem::create_directories(out);
            for (const ReprSelector& sel : manifest.representations) {
                const int n_dt = is_samp(sel.kind) ? 10 : 1;
                for (int dt = 0; dt < n_dt; ++dt) {
                    const RepresentationSpec spec = spec_for(sel, ds.meta, dt);
                    std::string tag = repr_tag(spec);
                    if (is_samp(sel.kind)) tag += "@dt" + std::to_string(dt);
                    FeatureMatrix train = build_matrix(ds.train, spec);
                    FeatureMatrix test = build_matrix(ds.test, spec);
                    write_feature_csv(train, out / (tag + ".train.csv"));
                    write_feature_csv(test, out / (tag + ".test.csv"));
                }
            }
        } catch (const std::exception& e) {
            std::cerr << "features failed for dataset " << dspec.name << ": "
                      << e.what() << "\n";
            failures++;
        }
    }
    return failures;
}

namespace {

struct CellTask {
    size_t dataset_index;
    size_t selector_index;
    Family family;
    Tuning tuning;
};

struct DatasetCache {
    ExtractedDataset data;
    // One pair per (selector, delta-t candidate); non-SAMP kinds use slot 0.
    std::vector<std::vector<MatrixPair>> pairs;
};

EvalCell evaluate_cell(const CellTask& task, const Manifest& manifest,
                       const DatasetCache& cache) {
    const ReprSelector& sel = manifest.representations[task.selector_index];
    const auto& pairs = cache.pairs[task.selector_index];

    EvalCell cell;
    cell.key = {cache.data.name, sel.kind, sel.fft, sel.header, task.family, task.tuning};
    cell.n_train = cache.data.meta.n_train_flows;
    cell.n_test = cache.data.meta.n_test_flows;

    std::vector<std::string> flags;
    double best_auc = -1.0;
    bool any = false;
    bool chosen_converged = true;

    for (size_t dt = 0; dt < pairs.size(); ++dt) {
        const MatrixPair& pair = pairs[dt];
        SweepResult result;
        if (task.tuning == Tuning::Opt) {
            const auto grid = hyper_grid(task.family, pair.train.rows, manifest.seed);
            result = sweep_opt(task.family, grid, pair.train, pair.test, manifest.seed,
                               manifest.detect);
        } else {
            const double hyper =
                default_hyper(task.family, pair.train.rows, manifest.seed);
            const TrainedModel model =
                train_model(task.family, hyper, pair.train, manifest.seed, manifest.detect);
            const RocResult roc = evaluate_model(model, pair.test);
            result.auc = roc.auc;
            result.hyper = hyper;
            result.converged = model.converged;
            result.roc = roc;
        }
        if (!any || result.auc > best_auc) {
            any = true;
            best_auc = result.auc;
            cell.auc = result.auc;
            cell.hyper = result.hyper;
            cell.error_bar = result.roc.error_bar;
            chosen_converged = result.converged;
            if (is_samp(sel.kind)) cell.delta_t = pairs[dt].train.spec.delta_t;
        }
        if (pair.train.zero_duration_flows + pair.test.zero_duration_flows > 0 &&
            dt == 0) {
            flags.push_back(
                "zero_duration=" +
                std::to_string(pair.train.zero_duration_flows + pair.test.zero_duration_flows));
        }
    }
    if (!chosen_converged) flags.insert(flags.begin(), "nonconverged");

    cell.status = "ok";
    if (!flags.empty()) {
        cell.status += "(";
        for (size_t i = 0; i < flags.size(); ++i) {
            if (i) cell.status += ";";
            cell.status += flags[i];
        }
        cell.status += ")";
    }
    return cell;
}

}  // namespace

EvaluateOutput run_evaluate(const Manifest& manifest, int jobs) {
    std::filesystem::create_directories(manifest.output_dir);

    EvaluateOutput out;
    out.report.seed = manifest.seed;

    // Extract datasets and build every needed matrix up front; the parallel
    // phase below only reads.
    std::vector<DatasetCache> caches;
    std::vector<std::string> failed_datasets;
    for (const DatasetSpec& spec : manifest.datasets) {
        DatasetCache cache;
        try {
            cache.data = extract_dataset(spec, manifest.seed, manifest.idle_timeout);
            for (const ReprSelector& sel : manifest.representations) {
                std::vector<MatrixPair> pairs;
                const int n_dt = is_samp(sel.kind) ? 10 : 1;
                for (int dt = 0; dt < n_dt; ++dt) {
                    pairs.push_back(build_pair(cache.data, spec_for(sel, cache.data.meta, dt)));
                }
                cache.pairs.push_back(std::move(pairs));
            }
        } catch (const std::exception& e) {
            std::cerr << "evaluate: dataset " << spec.name << " failed: " << e.what()
                      << "\n";
            failed_datasets.push_back(spec.name);
            out.failed_cells++;  // counted once per unusable dataset
            continue;
        }
        out.report.datasets[cache.data.name] = cache.data.meta;
        caches.push_back(std::move(cache));
    }

    std::vector<Tuning> tunings;
    if (manifest.tuning == TuningMode::Opt) tunings = {Tuning::Opt};
    else if (manifest.tuning == TuningMode::Default) tunings = {Tuning::Default};
    else tunings = {Tuning::Opt, Tuning::Default};

    std::vector<CellTask> tasks;
    for (size_t d = 0; d < caches.size(); ++d) {
        for (size_t s = 0; s < manifest.representations.size(); ++s) {
            for (Family family : manifest.detectors) {
                for (Tuning tuning : tunings) {
                    tasks.push_back({d, s, family, tuning});
                }
            }
        }
    }

    std::vector<EvalCell> cells(tasks.size());
    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
        while (true) {
            const size_t i = cursor.fetch_add(1);
            if (i >= tasks.size()) break;
            const CellTask& task = tasks[i];
            try {
                cells[i] = evaluate_cell(task, manifest, caches[task.dataset_index]);
            } catch (const std::exception& e) {
                EvalCell cell;
                const ReprSelector& sel = manifest.representations[task.selector_index];
                cell.key = {caches[task.dataset_index].data.name, sel.kind, sel.fft,
                            sel.header, task.family, task.tuning};
                cell.status = std::string("failed: ") + e.what();
                cells[i] = std::move(cell);
            }
        }
    };

    const int n_workers = std::max(1, jobs);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(n_workers));
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    out.report.cells = std::move(cells);
    for (const EvalCell& c : out.report.cells) {
        if (!c.ok()) out.failed_cells++;
    }

    // Optional model export for the `score` command: retrain the chosen
    // hyperparameter (same seed, same model) and serialize.
    if (manifest.save_models) {
        const auto model_dir = manifest.output_dir / "models";
        std::filesystem::create_directories(model_dir);
        for (const EvalCell& c : out.report.cells) {
            if (!c.ok()) continue;
            for (const DatasetCache& cache : caches) {
                if (cache.data.name != c.key.dataset) continue;
                for (size_t s = 0; s < manifest.representations.size(); ++s) {
                    const ReprSelector& sel = manifest.representations[s];
                    if (sel.kind != c.key.kind || sel.fft != c.key.fft ||
                        sel.header != c.key.header) {
                        continue;
                    }
                    size_t dt = 0;
                    if (c.delta_t) {
                        for (size_t i = 0; i < cache.pairs[s].size(); ++i) {
                            if (cache.pairs[s][i].train.spec.delta_t == *c.delta_t) dt = i;
                        }
                    }
                    const MatrixPair& pair = cache.pairs[s][dt];
                    TrainedModel model = train_model(c.key.family, c.hyper, pair.train,
                                                     manifest.seed, manifest.detect);
                    std::string name = c.key.dataset + "_" + repr_tag(pair.train.spec) +
                                       "_" + to_string(c.key.family) + "_" +
                                       to_string(c.key.tuning) + ".json";
                    save_model(model, model_dir / name);
                }
            }
        }
    }

    out.deltas = delta_experiments(out.report);

    for (const DatasetCache& cache : caches) {
        RepresentationSpec spec{ReprKind::Stats, false, true, cache.data.meta.d0, 0.0};
        FeatureMatrix with_header = build_matrix(cache.data.test, spec);
        try {
            out.correlations[cache.data.name] = header_correlations(with_header);
        } catch (const SingleClass&) {
            out.correlations[cache.data.name] = {};
        }
    }

    write_report_csv(out.report, manifest.output_dir / "report.csv");
    write_report_json(out.report, manifest.output_dir / "report.json");
    write_delta_csv(out.deltas.fft, manifest.output_dir / "delta_fft.csv");
    write_delta_csv(out.deltas.size, manifest.output_dir / "delta_size.csv");
    write_delta_csv(out.deltas.header, manifest.output_dir / "delta_header.csv");
    write_delta_svg("AUC difference: FFT vs raw time series", out.deltas.fft,
                    manifest.output_dir / "delta_fft.svg");
    write_delta_svg("AUC difference: including vs excluding packet size",
                    out.deltas.size, manifest.output_dir / "delta_size.svg");
    write_delta_svg("AUC difference: including vs excluding packet header",
                    out.deltas.header, manifest.output_dir / "delta_header.svg");
    write_correlations_csv(out.correlations, manifest.output_dir / "correlations.csv");

    for (const EvalCell& c : out.report.cells) {
        if (!c.ok()) {
            std::cerr << "failed cell: " << c.key.dataset << " " << to_string(c.key.kind)
                      << (c.key.fft ? "-FFT" : "") << (c.key.header ? "+HEADER" : "")
                      << " " << to_string(c.key.family) << " " << to_string(c.key.tuning)
                      << " -> " << c.status << "\n";
        }
    }
    return out;
}

std::filesystem::path run_synth(const std::string& scenario, uint64_t seed,
                                const std::filesystem::path& out_dir, int n_train,
                                int n_test_normal, int n_test_novel) {
    std::filesystem::create_directories(out_dir);
    Scenario s = make_scenario(scenario, n_train, n_test_normal, n_test_novel);

    std::vector<uint32_t> monitored;
    auto emit_part = [&](const std::vector<TrafficProfile>& profiles,
                         const std::string& part) {
        SynthResult result = generate(profiles, mix_seed(seed, part_tag(part)));
        emit_pcap(result.packets, out_dir / (scenario + "." + part + ".pcap"));
        for (uint32_t ip : result.monitored_src) {
            if (std::find(monitored.begin(), monitored.end(), ip) == monitored.end()) {
                monitored.push_back(ip);
            }
        }
    };
    emit_part(s.train, "train");
    emit_part(s.test_normal, "test-normal");
    emit_part(s.test_novel, "test-novel");

    nlohmann::json reprs = nlohmann::json::array();
    auto add_repr = [&](const std::string& kind, bool fft, bool header) {
        reprs.push_back({{"kind", kind}, {"fft", fft}, {"header", header}});
    };
    add_repr("STATS", false, false);
    add_repr("SIZE", false, false);
    add_repr("IAT", false, false);
    add_repr("IAT+SIZE", false, false);
    add_repr("SAMP-NUM", false, false);
    add_repr("SAMP-SIZE", false, false);
    add_repr("IAT", true, false);
    add_repr("SAMP-NUM", true, false);
    add_repr("SAMP-SIZE", true, false);
    add_repr("STATS", false, true);
    add_repr("IAT+SIZE", false, true);
    add_repr("SAMP-SIZE", false, true);

    nlohmann::json monitored_json = nlohmann::json::array();
    for (uint32_t ip : monitored) monitored_json.push_back(format_ipv4(ip));

    nlohmann::json manifest = {
        {"schema", 1},
        {"seed", seed},
        {"output_dir", "out"},
        {"tuning", "opt"},
        {"datasets",
         {{{"name", scenario},
           {"train_files", {scenario + ".train.pcap"}},
           {"test_files",
            {{{"path", scenario + ".test-normal.pcap"}, {"label", "normal"}},
             {{"path", scenario + ".test-novel.pcap"}, {"label", "novel"}}}},
           {"monitored_src", monitored_json}}}},
        {"representations", reprs},
        {"detectors", {"OCSVM", "KDE", "GMM", "IF", "PCA", "AE"}}};

    const auto manifest_path = out_dir / (scenario + ".manifest.json");
    std::ofstream f(manifest_path, std::ios::trunc);
    if (!f) throw IoError("cannot open " + manifest_path.string() + " for writing");
    f << manifest.dump(2) << "\n";
    return manifest_path;
}

void run_score(const std::filesystem::path& model_path,
               const std::filesystem::path& features_csv,
               const std::filesystem::path& out_csv) {
    const TrainedModel model = load_model(model_path);
    const FeatureCsv features = read_feature_csv(features_csv);
    if (features.rows.cols() != model.input_dim) {
        throw DimensionMismatch("feature csv width does not match the model");
    }
    std::ofstream f(out_csv, std::ios::trunc);
    if (!f) throw IoError("cannot open " + out_csv.string() + " for writing");
    f << "score,label\n";
    for (Eigen::Index i = 0; i < features.rows.rows(); ++i) {
        const double s = model.score_raw(features.rows.row(i).transpose());
        f << format_double(s) << ',' << to_string(features.labels[static_cast<size_t>(i)])
          << '\n';
    }
}

}  // namespace flowrep
