#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowrep/detect/model_io.hpp"
#include "flowrep/represent.hpp"

namespace flowrep {

struct RocResult {
    double auc = 0.0;
    std::vector<std::pair<double, double>> curve;  // (false alarm, detection)
    int n_test = 0;
    double error_bar = 0.0;  // 1/sqrt(n_test)
};

/// ROC by sweeping the threshold over all distinct scores (flag when
/// S(x) < t); AUC by trapezoidal integration, which equals the half-credit
/// rank statistic P(S_novel < S_normal) + P(tie)/2. Throws EmptyInput /
/// NonFiniteScore.
RocResult roc_auc(std::span<const double> scores_normal,
                  std::span<const double> scores_novel);

enum class Tuning { Opt, Default };

std::string to_string(Tuning t);

struct DetectOptions {
    double ocsvm_nu = 0.5;
    double gmm_reg = 1e-6;
    int if_subsample = 256;
    int ae_epochs = 100;
    int ae_batch = 32;
};

/// Hyperparameter grids. OCSVM/KDE bandwidths are the {0.1..0.9, 0.95}
/// nearest-rank quantiles of pairwise training distances; GMM k, IF tree
/// count and PCA/AE embedding dims follow the published ranges.
std::vector<double> hyper_grid(Family family, const Eigen::MatrixXd& X_train,
                               uint64_t global_seed);

/// Rule-of-thumb choice: 0.3-quantile bandwidth (OCSVM/KDE), quickshift++
/// mode count (GMM), 100 trees (IF), Minka MLE dim (PCA), ceil(d/2) (AE).
double default_hyper(Family family, const Eigen::MatrixXd& X_train,
                     uint64_t global_seed);

/// Train one detector. Stochastic families derive their RNG stream from
/// (global_seed, family, hyperparameter value), so a hyperparameter value
/// trains the same model whether it came from the grid or the default rule.
TrainedModel train_model(Family family, double hyper, const FeatureMatrix& train_std,
                         uint64_t global_seed, const DetectOptions& opts = {});

/// Scores for the rows of a standardized test matrix.
std::vector<double> score_matrix(const TrainedModel& model, const FeatureMatrix& test_std);

/// AUC of a model on a labeled, standardized test matrix.
RocResult evaluate_model(const TrainedModel& model, const FeatureMatrix& test_std);

struct SweepResult {
    double auc = 0.0;
    double hyper = 0.0;
    int hyper_index = -1;
    bool converged = true;
    RocResult roc;
};

/// OPT selection: max test AUC over the grid, ties to the smaller index.
SweepResult sweep_opt(Family family, std::span<const double> grid,
                      const FeatureMatrix& train_std, const FeatureMatrix& test_std,
                      uint64_t global_seed, const DetectOptions& opts = {});

struct CellKey {
    std::string dataset;
    ReprKind kind = ReprKind::Stats;
    bool fft = false;
    bool header = false;
    Family family = Family::Kde;
    Tuning tuning = Tuning::Opt;

    auto operator<=>(const CellKey&) const = default;
};

struct EvalCell {
    CellKey key;
    std::string status = "ok";  // "ok", possibly with flags, or "failed: ..."
    double auc = 0.0;
    double hyper = 0.0;
    std::optional<double> delta_t;  // SAMP kinds only
    int n_train = 0;
    int n_test = 0;
    double error_bar = 0.0;

    bool ok() const { return status.rfind("failed", 0) != 0; }
};

struct DatasetMeta {
    int d0 = 0;
    double duration_cap = 0.0;
    std::vector<double> delta_t_candidates;
    int n_train_flows = 0;
    int n_test_flows = 0;
};

struct EvalReport {
    uint64_t seed = 0;
    std::vector<EvalCell> cells;
    std::map<std::string, DatasetMeta> datasets;

    const EvalCell* find(const CellKey& key) const;
};

struct DeltaRow {
    std::string dataset;
    Family family = Family::Kde;
    Tuning tuning = Tuning::Opt;
    std::string pair_name;  // e.g. "IAT-FFT vs IAT"
    double auc_base = 0.0;
    double auc_variant = 0.0;
    double delta = 0.0;
    double error_bar = 0.0;
};

struct DeltaTables {
    std::vector<DeltaRow> fft;     // X-FFT minus X
    std::vector<DeltaRow> size;    // IAT+SIZE minus IAT, SAMP-SIZE minus SAMP-NUM
    std::vector<DeltaRow> header;  // X+HEADER minus X
};

/// Build the three difference tables from the report's cells. Pairs with a
/// failed member are skipped; with strict=true a pair whose other member is
/// absent raises MissingCell.
DeltaTables delta_experiments(const EvalReport& report, bool strict = false);

/// Pearson correlation of each header feature against the binary label
/// (novel=1), ranked by |r| descending; constant columns report r = 0.
/// Throws SingleClass unless both labels are present.
std::vector<std::pair<std::string, double>> header_correlations(
    const FeatureMatrix& matrix_with_header, int top_k = 6);

}  // namespace flowrep
