#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace flowrep {

/// Average path length adjustment c(psi) = 2 H(psi-1) - 2 (psi-1)/psi with
/// the exact harmonic number.
double iforest_c_factor(int psi);

struct IsoNode {
    int feature = -1;  // -1 = leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int size = 0;  // leaf population
};

struct IsoTree {
    std::vector<IsoNode> nodes;

    double path_length(const Eigen::VectorXd& x) const;
};

struct IsolationForest {
    int n_trees = 100;
    int subsample = 256;
    uint64_t seed = 0;
    double c_psi = 1.0;
    std::vector<IsoTree> trees;

    /// Normality score: -s(x) where s(x) = 2^(-E[h(x)]/c(psi)).
    double score(const Eigen::VectorXd& x) const;
    double anomaly_score(const Eigen::VectorXd& x) const;
};

IsolationForest if_train(const Eigen::MatrixXd& X, int n_trees,
                         int subsample = 256, uint64_t seed = 0);

}  // namespace flowrep
