#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace flowrep {

/// PCA reconstruction-error detector. Axes are the top-dim eigenvectors of
/// the population covariance, each flipped so its largest-magnitude
/// component is positive (deterministic sign).
struct PcaModel {
    int dim = 1;
    Eigen::VectorXd mean;
    Eigen::MatrixXd components;   // d x dim, orthonormal columns
    Eigen::VectorXd eigenvalues;  // all d, descending

    /// -|| (x - mu) - P P^T (x - mu) ||^2
    double score(const Eigen::VectorXd& x) const;
};

PcaModel pca_train(const Eigen::MatrixXd& X, int dim);

/// Minka's Laplace-approximation evidence for a given rank; non-finite
/// results are treated as -inf by pca_mle_dim.
double pca_minka_log_evidence(std::span<const double> eigenvalues_desc, int rank, int n);

/// argmax of the Minka evidence over ranks 1..d-1, ties toward smaller rank.
int pca_mle_dim(std::span<const double> eigenvalues_desc, int n);

/// The hyperparameter grid ceil(1 + i (d-2)/9), i = 0..9, deduplicated.
std::vector<int> pca_dim_grid(int d);

}  // namespace flowrep
