#pragma once

#include <Eigen/Dense>

namespace flowrep {

/// One-class SVM with a Gaussian kernel, trained on the standard dual
///   min 1/2 a^T K a   s.t.  0 <= a_i <= 1/(nu n),  sum a_i = 1
/// by pairwise projected coordinate descent on the maximal KKT-violating
/// pair (tolerance 1e-6, capped sweeps).
struct OcsvmModel {
    double sigma = 1.0;
    double nu = 0.5;
    double rho = 0.0;
    Eigen::MatrixXd train;    // all training rows (alpha aligns with rows)
    Eigen::VectorXd alpha;
    bool converged = true;
    double dual_objective = 0.0;

    /// sum_i alpha_i k(x_i, x) - rho
    double score(const Eigen::VectorXd& x) const;
};

OcsvmModel ocsvm_train(const Eigen::MatrixXd& X, double sigma, double nu = 0.5,
                       double kkt_tol = 1e-6, int max_sweeps = 10000);

}  // namespace flowrep
