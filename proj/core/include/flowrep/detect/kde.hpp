#pragma once

#include <Eigen/Dense>

namespace flowrep {

/// Gaussian-kernel density without the normalizing constant; AUC only
/// depends on score order so the constant is irrelevant.
struct KdeModel {
    double sigma = 1.0;
    Eigen::MatrixXd train;

    /// (1/n) sum_i exp(-||x - X_i||^2 / (2 sigma^2))
    double score(const Eigen::VectorXd& x) const;
};

KdeModel kde_train(const Eigen::MatrixXd& X, double sigma);

}  // namespace flowrep
