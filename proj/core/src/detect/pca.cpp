#include "flowrep/detect/pca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flowrep/errors.hpp"

namespace flowrep {

double PcaModel::score(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd centered = x - mean;
    const Eigen::VectorXd residual = centered - components * (components.transpose() * centered);
    return -residual.squaredNorm();
}

PcaModel pca_train(const Eigen::MatrixXd& X, int dim) {
    const Eigen::Index d = X.cols();
    if (dim < 1 || dim > d - 1) throw Error("PCA dim must be in [1, d-1]");

    PcaModel model;
    model.dim = dim;
    model.mean = X.colwise().mean();
    const Eigen::MatrixXd centered = X.rowwise() - model.mean.transpose();
    const Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(X.rows());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw Error("PCA eigendecomposition failed");

    // Eigen returns ascending order; flip to descending.
    model.eigenvalues = solver.eigenvalues().reverse();
    model.components.resize(d, dim);
    for (int j = 0; j < dim; ++j) {
        Eigen::VectorXd axis = solver.eigenvectors().col(d - 1 - j);
        Eigen::Index peak;
        axis.cwiseAbs().maxCoeff(&peak);
        if (axis[peak] < 0.0) axis = -axis;  // deterministic sign
        model.components.col(j) = axis;
    }
    return model;
}

double pca_minka_log_evidence(std::span<const double> eigenvalues_desc, int rank, int n) {
    const int d = static_cast<int>(eigenvalues_desc.size());
    if (rank < 1 || rank >= d) throw Error("Minka rank must be in [1, d-1]");
    constexpr double eps = 1e-15;
    const auto& lam = eigenvalues_desc;

    if (lam[static_cast<size_t>(rank - 1)] < eps) {
        return -std::numeric_limits<double>::infinity();
    }

    double pu = -rank * std::log(2.0);
    for (int i = 1; i <= rank; ++i) {
        pu += std::lgamma((d - i + 1) / 2.0) - std::log(M_PI) * (d - i + 1) / 2.0;
    }

    double pl = 0.0;
    for (int i = 0; i < rank; ++i) pl += std::log(lam[static_cast<size_t>(i)]);
    pl *= -n / 2.0;

    double trailing = 0.0;
    for (int i = rank; i < d; ++i) trailing += lam[static_cast<size_t>(i)];
    const double v = std::max(eps, trailing / (d - rank));
    const double pv = -std::log(v) * n * (d - rank) / 2.0;

    const double m = static_cast<double>(d) * rank - rank * (rank + 1.0) / 2.0;
    const double pp = std::log(2.0 * M_PI) * (m + rank) / 2.0;

    std::vector<double> lam_capped(lam.begin(), lam.end());
    for (int i = rank; i < d; ++i) lam_capped[static_cast<size_t>(i)] = v;
    double pa = 0.0;
    for (int i = 0; i < rank; ++i) {
        for (int j = i + 1; j < d; ++j) {
            pa += std::log((lam[static_cast<size_t>(i)] - lam[static_cast<size_t>(j)]) *
                           (1.0 / lam_capped[static_cast<size_t>(j)] -
                            1.0 / lam_capped[static_cast<size_t>(i)])) +
                  std::log(static_cast<double>(n));
        }
    }

    return pu + pl + pv + pp - pa / 2.0 - rank * std::log(static_cast<double>(n)) / 2.0;
}

int pca_mle_dim(std::span<const double> eigenvalues_desc, int n) {
    const int d = static_cast<int>(eigenvalues_desc.size());
    if (d < 2) throw Error("Minka MLE needs at least 2 eigenvalues");

    int best_rank = 1;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (int rank = 1; rank < d; ++rank) {
        double ll = pca_minka_log_evidence(eigenvalues_desc, rank, n);
        // Exact eigenvalue ties produce log(0) terms; treat as unassessable.
        if (!std::isfinite(ll)) ll = -std::numeric_limits<double>::infinity();
        if (ll > best_ll) {
            best_ll = ll;
            best_rank = rank;
        }
    }
    return best_rank;
}

std::vector<int> pca_dim_grid(int d) {
    if (d < 2) throw Error("projection dim grid needs d >= 2");
    std::vector<int> grid;
    for (int i = 0; i <= 9; ++i) {
        const int dim = static_cast<int>(
            std::ceil(1.0 + i * (static_cast<double>(d) - 2.0) / 9.0));
        grid.push_back(std::clamp(dim, 1, d - 1));
    }
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

}  // namespace flowrep
