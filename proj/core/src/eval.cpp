#include "flowrep/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "flowrep/detect/quickshift.hpp"
#include "flowrep/errors.hpp"
#include "flowrep/rng.hpp"

namespace flowrep {

RocResult roc_auc(std::span<const double> scores_normal,
                  std::span<const double> scores_novel) {
    if (scores_normal.empty() || scores_novel.empty()) {
        throw EmptyInput("roc_auc needs both score lists non-empty");
    }
    for (double s : scores_normal) {
        if (!std::isfinite(s)) throw NonFiniteScore("non-finite normal score");
    }
    for (double s : scores_novel) {
        if (!std::isfinite(s)) throw NonFiniteScore("non-finite novel score");
    }

    std::vector<double> normal(scores_normal.begin(), scores_normal.end());
    std::vector<double> novel(scores_novel.begin(), scores_novel.end());
    std::sort(normal.begin(), normal.end());
    std::sort(novel.begin(), novel.end());

    std::vector<double> thresholds;
    thresholds.reserve(normal.size() + novel.size());
    std::merge(normal.begin(), normal.end(), novel.begin(), novel.end(),
               std::back_inserter(thresholds));
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                     thresholds.end());

    const double n0 = static_cast<double>(normal.size());
    const double n1 = static_cast<double>(novel.size());

    RocResult result;
    result.curve.emplace_back(0.0, 0.0);
    for (double t : thresholds) {
        // Flagged novel when S < t; strict inequality, so count below t.
        const double fa =
            std::lower_bound(normal.begin(), normal.end(), t) - normal.begin();
        const double dr = std::lower_bound(novel.begin(), novel.end(), t) - novel.begin();
        result.curve.emplace_back(fa / n0, dr / n1);
    }
    result.curve.emplace_back(1.0, 1.0);
    result.curve.erase(std::unique(result.curve.begin(), result.curve.end()),
                       result.curve.end());

    double auc = 0.0;
    for (size_t i = 1; i < result.curve.size(); ++i) {
        const auto& [fa0, dr0] = result.curve[i - 1];
        const auto& [fa1, dr1] = result.curve[i];
        auc += (fa1 - fa0) * 0.5 * (dr0 + dr1);
    }
    result.auc = auc;
    result.n_test = static_cast<int>(normal.size() + novel.size());
    result.error_bar = 1.0 / std::sqrt(static_cast<double>(result.n_test));
    return result;
}

std::string to_string(Tuning t) { return t == Tuning::Opt ? "opt" : "default"; }

std::vector<double> hyper_grid(Family family, const Eigen::MatrixXd& X_train,
                               uint64_t global_seed) {
    std::vector<double> grid;
    switch (family) {
        case Family::Ocsvm:
        case Family::Kde: {
            const auto dists = sorted_pairwise_distances(X_train, global_seed);
            for (double q : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95}) {
                double sigma = sorted_nearest_rank(dists, q);
                if (sigma <= 0.0) {
                    sigma = 1.0;
                    for (double d : dists) {
                        if (d > 0.0) {
                            sigma = d;
                            break;
                        }
                    }
                }
                grid.push_back(sigma);
            }
            break;
        }
        case Family::Gmm:
            grid = {2, 5, 8, 11, 14, 17, 20, 23, 26, 30};
            break;
        case Family::IsolationForest:
            for (int k = 30; k <= 300; k += 10) grid.push_back(k);
            break;
        case Family::Pca:
        case Family::Autoencoder: {
            for (int dim : pca_dim_grid(static_cast<int>(X_train.cols()))) {
                grid.push_back(dim);
            }
            break;
        }
    }
    return grid;
}

double default_hyper(Family family, const Eigen::MatrixXd& X_train,
                     uint64_t global_seed) {
    const int d = static_cast<int>(X_train.cols());
    const auto n = X_train.rows();
    switch (family) {
        case Family::Ocsvm:
        case Family::Kde:
            return distance_quantile_sigma(X_train, 0.3, global_seed);
        case Family::Gmm: {
            const int knn_k = static_cast<int>(
                std::ceil(std::sqrt(static_cast<double>(n))));
            return quickshiftpp_mode_count(X_train, std::max(knn_k, 2));
        }
        case Family::IsolationForest:
            return 100;
        case Family::Pca: {
            PcaModel probe = pca_train(X_train, 1);
            std::vector<double> spectrum(probe.eigenvalues.data(),
                                         probe.eigenvalues.data() + probe.eigenvalues.size());
            return pca_mle_dim(spectrum, static_cast<int>(n));
        }
        case Family::Autoencoder:
            return std::ceil(d / 2.0);
    }
    return 0.0;
}

namespace {

uint64_t model_seed(uint64_t global_seed, Family family, double hyper) {
    uint64_t hyper_bits;
    static_assert(sizeof(hyper_bits) == sizeof(hyper));
    std::memcpy(&hyper_bits, &hyper, sizeof(hyper));
    return mix_seed(global_seed, static_cast<uint64_t>(family), hyper_bits);
}

}  // namespace

TrainedModel train_model(Family family, double hyper, const FeatureMatrix& train_std,
                         uint64_t global_seed, const DetectOptions& opts) {
    TrainedModel model;
    model.family = family;
    model.hyper = hyper;
    model.input_dim = static_cast<int>(train_std.dim());
    model.seed = model_seed(global_seed, family, hyper);
    model.standardization = train_std.standardization;

    const Eigen::MatrixXd& X = train_std.rows;
    const int d = static_cast<int>(X.cols());
    switch (family) {
        case Family::Kde:
            model.impl = kde_train(X, hyper);
            break;
        case Family::Ocsvm: {
            OcsvmModel m = ocsvm_train(X, hyper, opts.ocsvm_nu);
            model.converged = m.converged;
            model.impl = std::move(m);
            break;
        }
        case Family::Gmm:
            model.impl = gmm_train(X, static_cast<int>(hyper), opts.gmm_reg, model.seed);
            break;
        case Family::IsolationForest:
            model.impl =
                if_train(X, static_cast<int>(hyper), opts.if_subsample, model.seed);
            break;
        case Family::Pca: {
            if (d < 2) throw Error("PCA needs at least 2 features");
            const int dim = std::clamp(static_cast<int>(hyper), 1, d - 1);
            model.impl = pca_train(X, dim);
            break;
        }
        case Family::Autoencoder: {
            if (d < 2) throw Error("AE needs at least 2 features");
            const int dim = std::clamp(static_cast<int>(hyper), 1, d - 1);
            model.impl = ae_train(X, dim, model.seed, opts.ae_epochs, opts.ae_batch);
            break;
        }
    }
    return model;
}

std::vector<double> score_matrix(const TrainedModel& model, const FeatureMatrix& test_std) {
    std::vector<double> scores;
    scores.reserve(static_cast<size_t>(test_std.n()));
    for (Eigen::Index i = 0; i < test_std.n(); ++i) {
        scores.push_back(model.score(test_std.rows.row(i).transpose()));
    }
    return scores;
}

RocResult evaluate_model(const TrainedModel& model, const FeatureMatrix& test_std) {
    std::vector<double> normal, novel;
    for (Eigen::Index i = 0; i < test_std.n(); ++i) {
        const double s = model.score(test_std.rows.row(i).transpose());
        if (test_std.labels[static_cast<size_t>(i)] == Label::Novel) {
            novel.push_back(s);
        } else {
            normal.push_back(s);
        }
    }
    return roc_auc(normal, novel);
}

SweepResult sweep_opt(Family family, std::span<const double> grid,
                      const FeatureMatrix& train_std, const FeatureMatrix& test_std,
                      uint64_t global_seed, const DetectOptions& opts) {
    if (grid.empty()) throw EmptyInput("sweep_opt needs a non-empty grid");

    SweepResult best;
    std::string first_error;
    for (size_t gi = 0; gi < grid.size(); ++gi) {
        try {
            const TrainedModel model = train_model(family, grid[gi], train_std,
                                                   global_seed, opts);
            const RocResult roc = evaluate_model(model, test_std);
            if (best.hyper_index < 0 || roc.auc > best.auc) {
                best.auc = roc.auc;
                best.hyper = grid[gi];
                best.hyper_index = static_cast<int>(gi);
                best.converged = model.converged;
                best.roc = roc;
            }
        } catch (const std::exception& e) {
            // A grid value that cannot train (say k > n) drops out of the
            // sweep; the cell only fails when every value does.
            if (first_error.empty()) first_error = e.what();
        }
    }
    if (best.hyper_index < 0) {
        throw Error("every grid value failed; first error: " + first_error);
    }
    return best;
}

const EvalCell* EvalReport::find(const CellKey& key) const {
    for (const auto& cell : cells) {
        if (cell.key == key) return &cell;
    }
    return nullptr;
}

namespace {

void add_delta_rows(const EvalReport& report, std::vector<DeltaRow>& out,
                    ReprKind base_kind, bool base_fft, bool base_header,
                    ReprKind var_kind, bool var_fft, bool var_header, bool strict) {
    // Collect the (dataset, family, tuning) combinations present.
    std::vector<std::tuple<std::string, Family, Tuning>> combos;
    for (const auto& cell : report.cells) {
        auto combo = std::make_tuple(cell.key.dataset, cell.key.family, cell.key.tuning);
        if (std::find(combos.begin(), combos.end(), combo) == combos.end()) {
            combos.push_back(combo);
        }
    }
    for (const auto& [dataset, family, tuning] : combos) {
        const EvalCell* base =
            report.find({dataset, base_kind, base_fft, base_header, family, tuning});
        const EvalCell* variant =
            report.find({dataset, var_kind, var_fft, var_header, family, tuning});
        if (base == nullptr && variant == nullptr) continue;
        if (base == nullptr || variant == nullptr) {
            if (strict) {
                throw MissingCell("delta pair incomplete for dataset " + dataset);
            }
            continue;
        }
        if (!base->ok() || !variant->ok()) continue;  // skip failed members

        DeltaRow row;
        row.dataset = dataset;
        row.family = family;
        row.tuning = tuning;

        RepresentationSpec b{base_kind, base_fft, base_header, 2, base_kind == ReprKind::SampNum || base_kind == ReprKind::SampSize ? 1.0 : 0.0};
        RepresentationSpec v{var_kind, var_fft, var_header, 2, var_kind == ReprKind::SampNum || var_kind == ReprKind::SampSize ? 1.0 : 0.0};
        row.pair_name = repr_tag(v) + " vs " + repr_tag(b);
        row.auc_base = base->auc;
        row.auc_variant = variant->auc;
        row.delta = variant->auc - base->auc;
        row.error_bar = base->error_bar;
        out.push_back(std::move(row));
    }
}

}  // namespace

DeltaTables delta_experiments(const EvalReport& report, bool strict) {
    DeltaTables tables;
    for (ReprKind kind : {ReprKind::Iat, ReprKind::SampNum, ReprKind::SampSize}) {
        add_delta_rows(report, tables.fft, kind, false, false, kind, true, false, strict);
    }
    add_delta_rows(report, tables.size, ReprKind::Iat, false, false,
                   ReprKind::IatSize, false, false, strict);
    add_delta_rows(report, tables.size, ReprKind::SampNum, false, false,
                   ReprKind::SampSize, false, false, strict);
    for (ReprKind kind : {ReprKind::Stats, ReprKind::IatSize, ReprKind::SampSize}) {
        add_delta_rows(report, tables.header, kind, false, false, kind, false, true, strict);
    }
    return tables;
}

std::vector<std::pair<std::string, double>> header_correlations(
    const FeatureMatrix& matrix_with_header, int top_k) {
    const auto& labels = matrix_with_header.labels;
    int novel = 0;
    for (Label l : labels) novel += l == Label::Novel ? 1 : 0;
    if (novel == 0 || novel == static_cast<int>(labels.size())) {
        throw SingleClass("header_correlations needs both classes");
    }

    Eigen::VectorXd y(matrix_with_header.n());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        y[i] = labels[static_cast<size_t>(i)] == Label::Novel ? 1.0 : 0.0;
    }
    const double y_mean = y.mean();
    const Eigen::VectorXd yc = y.array() - y_mean;
    const double y_norm = yc.norm();

    std::vector<std::pair<std::string, double>> ranked;
    for (size_t j = 0; j < matrix_with_header.names.size(); ++j) {
        const std::string& name = matrix_with_header.names[j];
        if (name.rfind("flag_", 0) != 0 && name.rfind("ttl_", 0) != 0) continue;
        Eigen::VectorXd col = matrix_with_header.rows.col(static_cast<Eigen::Index>(j));
        const Eigen::VectorXd xc = col.array() - col.mean();
        const double x_norm = xc.norm();
        const double r =
            x_norm > 1e-12 && y_norm > 1e-12 ? xc.dot(yc) / (x_norm * y_norm) : 0.0;
        ranked.emplace_back(name, r);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return std::abs(a.second) > std::abs(b.second);
    });
    if (static_cast<int>(ranked.size()) > top_k) {
        ranked.resize(static_cast<size_t>(top_k));
    }
    return ranked;
}

}  // namespace flowrep
