#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "flowrep/detect/autoencoder.hpp"
#include "flowrep/detect/common.hpp"
#include "flowrep/detect/gmm.hpp"
#include "flowrep/detect/iforest.hpp"
#include "flowrep/detect/kde.hpp"
#include "flowrep/detect/ocsvm.hpp"
#include "flowrep/detect/pca.hpp"
#include "flowrep/represent.hpp"

namespace flowrep {

/// A fitted detector with the uniform scoring interface (higher = more
/// normal) plus everything needed to reuse it: hyperparameter, seed, and the
/// feature standardization it was trained under.
struct TrainedModel {
    Family family = Family::Kde;
    double hyper = 0.0;
    int input_dim = 0;
    uint64_t seed = 0;
    bool converged = true;
    std::variant<KdeModel, OcsvmModel, GmmModel, IsolationForest, PcaModel, Autoencoder>
        impl;
    Standardization standardization;

    /// Score of an already-standardized feature vector.
    double score(const Eigen::VectorXd& x) const;
    /// Standardize a raw feature vector with the stored parameters, then score.
    double score_raw(const Eigen::VectorXd& x) const;
};

/// Versioned JSON document (schema 1) with flattened parameter arrays.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace flowrep
