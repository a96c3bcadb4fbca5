#include "flowrep/detect/gmm.hpp"

#include <cmath>
#include <limits>

#include "flowrep/errors.hpp"
#include "flowrep/rng.hpp"

namespace flowrep {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

struct Component {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    Eigen::MatrixXd chol;
    double log_det = 0.0;
};

// log N(x | mean, cov) via the cached Cholesky factor.
double log_gaussian(const Eigen::VectorXd& x, const Component& c) {
    const Eigen::VectorXd diff = x - c.mean;
    const Eigen::VectorXd y = c.chol.triangularView<Eigen::Lower>().solve(diff);
    const double d = static_cast<double>(x.size());
    return -0.5 * (d * kLog2Pi + c.log_det + y.squaredNorm());
}

bool factorize(Component& c) {
    Eigen::LLT<Eigen::MatrixXd> llt(c.cov);
    if (llt.info() != Eigen::Success) return false;
    c.chol = llt.matrixL();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < c.chol.rows(); ++i) {
        const double l = c.chol(i, i);
        if (!(l > 0.0) || !std::isfinite(l)) return false;
        log_det += 2.0 * std::log(l);
    }
    c.log_det = log_det;
    return true;
}

double log_sum_exp(const Eigen::VectorXd& v) {
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((v.array() - m).exp().sum());
}

std::vector<Eigen::Index> kmeanspp_centers(const Eigen::MatrixXd& X, int k, Rng& rng) {
    const Eigen::Index n = X.rows();
    std::vector<Eigen::Index> centers;
    centers.push_back(static_cast<Eigen::Index>(rng.uniform_int(0, static_cast<int>(n) - 1)));
    Eigen::VectorXd d2 =
        (X.rowwise() - X.row(centers[0])).rowwise().squaredNorm();
    while (static_cast<int>(centers.size()) < k) {
        const double total = d2.sum();
        Eigen::Index pick;
        if (total > 0.0) {
            double target = rng.uniform01() * total;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                target -= d2[i];
                if (target <= 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(rng.uniform_int(0, static_cast<int>(n) - 1));
        }
        centers.push_back(pick);
        d2 = d2.cwiseMin((X.rowwise() - X.row(pick)).rowwise().squaredNorm());
    }
    return centers;
}

struct EmOutcome {
    std::vector<Component> comps;
    Eigen::VectorXd weights;
    std::vector<double> ll_history;
    bool ok = false;
};

EmOutcome run_em(const Eigen::MatrixXd& X, int k, double reg, uint64_t seed,
                 double tol, int max_iters) {
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    EmOutcome out;

    Rng rng(seed);
    const auto centers = kmeanspp_centers(X, k, rng);

    // Hard assignment to the seeded centers gives the initial responsibilities.
    Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j) {
            const double dist = (X.row(i) - X.row(centers[static_cast<size_t>(j)])).squaredNorm();
            if (dist < best_d) {
                best_d = dist;
                best = j;
            }
        }
        resp(i, best) = 1.0;
    }

    out.comps.resize(static_cast<size_t>(k));
    out.weights.resize(k);
    const Eigen::MatrixXd ridge = reg * Eigen::MatrixXd::Identity(d, d);

    auto m_step = [&]() -> bool {
        for (int j = 0; j < k; ++j) {
            auto& c = out.comps[static_cast<size_t>(j)];
            const double mass = resp.col(j).sum();
            if (!(mass > 1e-12)) return false;  // emptied component
            out.weights[j] = mass / static_cast<double>(n);
            c.mean = (resp.col(j).transpose() * X).transpose() / mass;
            Eigen::MatrixXd centered = X.rowwise() - c.mean.transpose();
            c.cov = (centered.transpose() *
                     resp.col(j).asDiagonal() * centered) / mass + ridge;
            if (!factorize(c)) return false;
        }
        return true;
    };

    if (!m_step()) return out;

    const double d_log_2pi = static_cast<double>(d) * kLog2Pi;
    Eigen::MatrixXd logp(n, k);
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iters; ++iter) {
        // E-step, one batched triangular solve per component; also yields
        // the mean log-likelihood under the current parameters.
        for (int j = 0; j < k; ++j) {
            const auto& c = out.comps[static_cast<size_t>(j)];
            const Eigen::MatrixXd centered =
                (X.rowwise() - c.mean.transpose()).transpose();  // d x n
            const Eigen::MatrixXd y =
                c.chol.triangularView<Eigen::Lower>().solve(centered);
            logp.col(j) =
                (-0.5 * (y.colwise().squaredNorm().array() + d_log_2pi + c.log_det) +
                 std::log(out.weights[j]))
                    .transpose();
        }
        double ll = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double norm = log_sum_exp(logp.row(i).transpose());
            ll += norm;
            resp.row(i) = (logp.row(i).array() - norm).exp();
        }
        ll /= static_cast<double>(n);
        if (!std::isfinite(ll)) return out;
        out.ll_history.push_back(ll);
        if (ll - prev_ll < tol && iter > 0) break;
        prev_ll = ll;
        if (!m_step()) return out;
    }
    out.ok = true;
    return out;
}

}  // namespace

double GmmModel::score(const Eigen::VectorXd& x) const {
    Eigen::VectorXd logp(k);
    for (int j = 0; j < k; ++j) {
        Component c{means[static_cast<size_t>(j)], covariances[static_cast<size_t>(j)],
                    chol_lower[static_cast<size_t>(j)], log_det[static_cast<size_t>(j)]};
        logp[j] = std::log(weights[j]) + log_gaussian(x, c);
    }
    return log_sum_exp(logp);
}

GmmModel gmm_train(const Eigen::MatrixXd& X, int k, double reg, uint64_t seed,
                   double tol, int max_iters) {
    if (k < 1) throw Error("GMM needs k >= 1");
    if (X.rows() < k) throw InsufficientData("GMM needs n >= k");

    EmOutcome outcome = run_em(X, k, reg, seed, tol, max_iters);
    if (!outcome.ok) {
        outcome = run_em(X, k, reg, mix_seed(seed, 1), tol, max_iters);  // one re-seed
        if (!outcome.ok) {
            throw DegenerateComponent("GMM covariance not positive definite after re-seed");
        }
    }

    GmmModel model;
    model.k = k;
    model.reg = reg;
    model.seed = seed;
    model.weights = outcome.weights;
    model.ll_history = std::move(outcome.ll_history);
    for (auto& c : outcome.comps) {
        model.means.push_back(std::move(c.mean));
        model.covariances.push_back(std::move(c.cov));
        model.chol_lower.push_back(std::move(c.chol));
        model.log_det.push_back(c.log_det);
    }
    return model;
}

}  // namespace flowrep
