#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace flowrep {

/// Full-covariance Gaussian mixture fitted by EM with k-means++ style
/// seeding. Covariances carry a ridge reg*I; a component that still fails
/// Cholesky (or empties out) triggers one re-seed, then DegenerateComponent.
struct GmmModel {
    int k = 1;
    double reg = 1e-6;
    uint64_t seed = 0;
    Eigen::VectorXd weights;
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covariances;
    std::vector<Eigen::MatrixXd> chol_lower;  // cached factor per component
    std::vector<double> log_det;
    std::vector<double> ll_history;  // mean log-likelihood per EM iteration

    /// Mixture log-density at x.
    double score(const Eigen::VectorXd& x) const;
};

GmmModel gmm_train(const Eigen::MatrixXd& X, int k, double reg = 1e-6,
                   uint64_t seed = 0, double tol = 1e-4, int max_iters = 200);

}  // namespace flowrep
