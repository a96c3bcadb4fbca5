#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "flowrep/rng.hpp"

namespace flowrep::oracles {

Eigen::VectorXd direct_dft_magnitudes(const Eigen::VectorXd& series) {
    const Eigen::Index n = series.size();
    Eigen::VectorXd mags(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double ang = -2.0 * M_PI * static_cast<double>(k) *
                               static_cast<double>(j) / static_cast<double>(n);
            acc += series[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        mags[k] = std::abs(acc);
    }
    return mags;
}

double pair_count_auc(std::span<const double> normal, std::span<const double> novel) {
    double credit = 0.0;
    for (double s1 : novel) {
        for (double s0 : normal) {
            if (s1 < s0) credit += 1.0;
            else if (s1 == s0) credit += 0.5;
        }
    }
    return credit / (static_cast<double>(normal.size()) * static_cast<double>(novel.size()));
}

double kde_direct_sum(const Eigen::MatrixXd& train, double sigma,
                      const Eigen::VectorXd& x) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
        double sq = 0.0;
        for (Eigen::Index j = 0; j < train.cols(); ++j) {
            const double diff = train(i, j) - x[j];
            sq += diff * diff;
        }
        acc += std::exp(-sq / (2.0 * sigma * sigma));
    }
    return acc / static_cast<double>(train.rows());
}

namespace {

// Euclidean projection onto {0 <= a_i <= C, sum a = 1} by bisection on the
// shift in clip(v - t, 0, C).
Eigen::VectorXd project_box_simplex(const Eigen::VectorXd& v, double C) {
    double lo = v.minCoeff() - 1.0;
    double hi = v.maxCoeff();
    for (int iter = 0; iter < 200; ++iter) {
        const double t = 0.5 * (lo + hi);
        double sum = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            sum += std::clamp(v[i] - t, 0.0, C);
        }
        if (sum > 1.0) lo = t;
        else hi = t;
    }
    const double t = 0.5 * (lo + hi);
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = std::clamp(v[i] - t, 0.0, C);
    return out;
}

}  // namespace

Eigen::VectorXd qp_box_simplex_reference(const Eigen::MatrixXd& K, double C, int iters) {
    const Eigen::Index n = K.rows();
    Eigen::VectorXd a = project_box_simplex(Eigen::VectorXd::Zero(n), C);
    // Step from the spectral bound: ||K||_2 <= trace(K).
    const double step = 1.0 / std::max(K.trace(), 1e-12);
    for (int i = 0; i < iters; ++i) {
        a = project_box_simplex(a - step * (K * a), C);
    }
    return a;
}

Eigen::MatrixXd gaussian_blob(const Eigen::VectorXd& center, double std, int n,
                              uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd X(n, center.size());
    for (int i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < center.size(); ++j) {
            X(i, j) = rng.normal(center[j], std);
        }
    }
    return X;
}

}  // namespace flowrep::oracles
