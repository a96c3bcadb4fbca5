#include "flowrep/detect/ocsvm.hpp"

#include <cmath>
#include <limits>

#include "flowrep/errors.hpp"

namespace flowrep {

double OcsvmModel::score(const Eigen::VectorXd& x) const {
    if (x.size() != train.cols()) throw DimensionMismatch("OCSVM query width mismatch");
    const double inv = 1.0 / (2.0 * sigma * sigma);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
        if (alpha[i] <= 0.0) continue;
        acc += alpha[i] * std::exp(-(train.row(i).transpose() - x).squaredNorm() * inv);
    }
    return acc - rho;
}

OcsvmModel ocsvm_train(const Eigen::MatrixXd& X, double sigma, double nu,
                       double kkt_tol, int max_sweeps) {
    const Eigen::Index n = X.rows();
    if (n < 1) throw InsufficientData("OCSVM needs at least one training point");
    if (!(sigma > 0.0)) throw Error("OCSVM bandwidth must be positive");
    if (!(nu > 0.0 && nu <= 1.0)) throw Error("OCSVM nu must be in (0,1]");

    const double C = 1.0 / (nu * static_cast<double>(n));
    const double inv = 1.0 / (2.0 * sigma * sigma);

    // Gram matrix from squared distances; unit diagonal.
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double k = std::exp(-(X.row(i) - X.row(j)).squaredNorm() * inv);
            K(i, j) = k;
            K(j, i) = k;
        }
    }

    OcsvmModel model;
    model.sigma = sigma;
    model.nu = nu;
    model.train = X;
    model.alpha = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));

    Eigen::VectorXd& a = model.alpha;
    Eigen::VectorXd g = K * a;  // gradient of 1/2 a^T K a

    const double bound_eps = 1e-12;
    bool reached_tol = false;
    for (int sweep = 0; sweep < max_sweeps && !reached_tol; ++sweep) {
        for (Eigen::Index step = 0; step < n; ++step) {
            // Maximal violating pair: mass moves from the highest gradient
            // (decreasable) to the lowest (increasable).
            Eigen::Index up = -1, down = -1;
            double g_up = std::numeric_limits<double>::infinity();
            double g_down = -std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < n; ++i) {
                if (a[i] < C - bound_eps && g[i] < g_up) {
                    g_up = g[i];
                    up = i;
                }
                if (a[i] > bound_eps && g[i] > g_down) {
                    g_down = g[i];
                    down = i;
                }
            }
            if (up < 0 || down < 0 || g_down - g_up <= kkt_tol) {
                reached_tol = g_down - g_up <= kkt_tol;
                break;
            }
            const double denom = K(up, up) + K(down, down) - 2.0 * K(up, down);
            double t = denom > 1e-12 ? (g_down - g_up) / denom
                                     : std::numeric_limits<double>::infinity();
            t = std::min(t, std::min(C - a[up], a[down]));
            a[up] += t;
            a[down] -= t;
            g += t * (K.col(up) - K.col(down));
        }
    }
    model.converged = reached_tol;

    // rho from the margin support vectors; fall back to the KKT interval
    // midpoint when every alpha sits at a bound.
    double rho_sum = 0.0;
    int free_count = 0;
    double upper = std::numeric_limits<double>::infinity();   // min g over a < C
    double lower = -std::numeric_limits<double>::infinity();  // max g over a > 0
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool at_lower = a[i] <= bound_eps;
        const bool at_upper = a[i] >= C - bound_eps;
        if (!at_lower && !at_upper) {
            rho_sum += g[i];
            free_count++;
        }
        if (!at_upper) upper = std::min(upper, g[i]);
        if (!at_lower) lower = std::max(lower, g[i]);
    }
    if (free_count > 0) {
        model.rho = rho_sum / free_count;
    } else if (std::isfinite(upper) && std::isfinite(lower)) {
        model.rho = 0.5 * (upper + lower);
    } else {
        model.rho = std::isfinite(lower) ? lower : 0.0;
    }

    model.dual_objective = 0.5 * a.dot(K * a);
    return model;
}

}  // namespace flowrep
