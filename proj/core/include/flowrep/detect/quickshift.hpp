#pragma once

#include <Eigen/Dense>

namespace flowrep {

/// Number of density modes found by the quickshift++ core-growing rule:
/// k-NN densities, processed in decreasing order; a point joins the core of
/// an existing region when it is a mutual-kNN neighbor and its density is at
/// least (1-beta) of the region's peak, and founds a new region when it has
/// no processed neighbors at all.
int quickshiftpp_mode_count_raw(const Eigen::MatrixXd& X, int knn_k, double beta = 0.3);

/// Raw mode count clamped to the GMM component grid range [2, 30].
int quickshiftpp_mode_count(const Eigen::MatrixXd& X, int knn_k, double beta = 0.3);

}  // namespace flowrep
