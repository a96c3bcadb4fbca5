#include "flowrep/detect/common.hpp"

#include <algorithm>
#include <cmath>

#include "flowrep/errors.hpp"
#include "flowrep/rng.hpp"

namespace flowrep {

std::string to_string(Family family) {
    switch (family) {
        case Family::Ocsvm: return "OCSVM";
        case Family::Kde: return "KDE";
        case Family::Gmm: return "GMM";
        case Family::IsolationForest: return "IF";
        case Family::Pca: return "PCA";
        case Family::Autoencoder: return "AE";
    }
    return "KDE";
}

Family family_from_string(const std::string& s) {
    if (s == "OCSVM") return Family::Ocsvm;
    if (s == "KDE") return Family::Kde;
    if (s == "GMM") return Family::Gmm;
    if (s == "IF") return Family::IsolationForest;
    if (s == "PCA") return Family::Pca;
    if (s == "AE") return Family::Autoencoder;
    throw Error("unknown detector family: " + s);
}

std::vector<Family> all_families() {
    return {Family::Ocsvm, Family::Kde,  Family::Gmm,
            Family::IsolationForest, Family::Pca, Family::Autoencoder};
}

std::vector<double> sorted_pairwise_distances(const Eigen::MatrixXd& X, uint64_t seed) {
    const Eigen::Index n_full = X.rows();
    if (n_full < 2) throw InsufficientData("pairwise distances need n >= 2");

    constexpr Eigen::Index kMaxPoints = 5000;
    Eigen::MatrixXd sample;
    const Eigen::MatrixXd* points = &X;
    if (n_full > kMaxPoints) {
        Rng rng(mix_seed(seed, 0x5e3d));
        std::vector<size_t> perm = rng.permutation(static_cast<size_t>(n_full));
        sample.resize(kMaxPoints, X.cols());
        for (Eigen::Index i = 0; i < kMaxPoints; ++i) {
            sample.row(i) = X.row(static_cast<Eigen::Index>(perm[static_cast<size_t>(i)]));
        }
        points = &sample;
    }

    const Eigen::Index n = points->rows();
    std::vector<double> dists;
    dists.reserve(static_cast<size_t>(n) * static_cast<size_t>(n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            dists.push_back((points->row(i) - points->row(j)).norm());
        }
    }
    std::sort(dists.begin(), dists.end());
    return dists;
}

double sorted_nearest_rank(const std::vector<double>& sorted, double q) {
    const size_t n = sorted.size();
    size_t rank = static_cast<size_t>(std::ceil(q * static_cast<double>(n)));
    if (rank == 0) rank = 1;
    if (rank > n) rank = n;
    return sorted[rank - 1];
}

double distance_quantile_sigma(const Eigen::MatrixXd& X, double q, uint64_t seed) {
    const auto dists = sorted_pairwise_distances(X, seed);
    const double value = sorted_nearest_rank(dists, q);
    if (value > 0.0) return value;
    for (double d : dists) {
        if (d > 0.0) return d;  // duplicate-heavy data: smallest nonzero
    }
    return 1.0;
}

}  // namespace flowrep
