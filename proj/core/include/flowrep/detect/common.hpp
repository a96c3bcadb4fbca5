#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace flowrep {

enum class Family { Ocsvm, Kde, Gmm, IsolationForest, Pca, Autoencoder };

std::string to_string(Family family);  // "OCSVM", "KDE", "GMM", "IF", "PCA", "AE"
Family family_from_string(const std::string& s);

std::vector<Family> all_families();

/// All n(n-1)/2 pairwise Euclidean distances, sorted ascending. For n > 5000
/// a seeded subsample of 5000 rows bounds the O(n^2) pairing.
std::vector<double> sorted_pairwise_distances(const Eigen::MatrixXd& X, uint64_t seed);

/// Nearest-rank quantile of an ascending-sorted vector.
double sorted_nearest_rank(const std::vector<double>& sorted, double q);

/// Nearest-rank q-quantile of pairwise distances; falls back to the smallest
/// nonzero distance (then 1.0) when the quantile is zero. Throws
/// InsufficientData for n < 2.
double distance_quantile_sigma(const Eigen::MatrixXd& X, double q, uint64_t seed = 0);

}  // namespace flowrep
