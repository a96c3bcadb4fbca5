#include "flowrep/detect/autoencoder.hpp"

#include <cmath>

#include "flowrep/errors.hpp"
#include "flowrep/rng.hpp"

namespace flowrep {

int ae_hidden_dim(int d, int latent_dim) {
    return std::min(d - 1, static_cast<int>(std::ceil(2.0 * latent_dim)));
}

namespace {

Eigen::MatrixXd leaky(const Eigen::MatrixXd& z, double slope) {
    return z.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
}

Eigen::MatrixXd leaky_grad(const Eigen::MatrixXd& z, double slope) {
    return z.unaryExpr([slope](double v) { return v > 0.0 ? 1.0 : slope; });
}

struct ForwardPass {
    // A[0] is the input; Z[l]/A[l+1] are layer l's pre/post activation.
    std::array<Eigen::MatrixXd, 5> A;
    std::array<Eigen::MatrixXd, 4> Z;
};

// Columns of X_t are samples.
ForwardPass forward(const Autoencoder& ae, const Eigen::MatrixXd& X_t) {
    ForwardPass f;
    f.A[0] = X_t;
    for (int l = 0; l < 4; ++l) {
        f.Z[l] = (ae.W[static_cast<size_t>(l)] * f.A[static_cast<size_t>(l)]).colwise() +
                 ae.b[static_cast<size_t>(l)];
        f.A[static_cast<size_t>(l) + 1] =
            l < 3 ? leaky(f.Z[static_cast<size_t>(l)], ae.leaky_slope)
                  : f.Z[static_cast<size_t>(l)];  // linear output
    }
    return f;
}

}  // namespace

Eigen::VectorXd Autoencoder::reconstruct(const Eigen::VectorXd& x) const {
    return forward(*this, x).A[4].col(0);
}

double Autoencoder::score(const Eigen::VectorXd& x) const {
    return -(x - reconstruct(x)).squaredNorm();
}

double ae_batch_loss(const Autoencoder& ae, const Eigen::MatrixXd& batch) {
    const Eigen::MatrixXd X_t = batch.transpose();
    const ForwardPass f = forward(ae, X_t);
    const double denom = static_cast<double>(batch.rows() * batch.cols());
    return (f.A[4] - X_t).squaredNorm() / denom;
}

AeGradients ae_backprop(const Autoencoder& ae, const Eigen::MatrixXd& batch) {
    const Eigen::MatrixXd X_t = batch.transpose();
    const ForwardPass f = forward(ae, X_t);
    const double denom = static_cast<double>(batch.rows() * batch.cols());

    AeGradients g;
    g.loss = (f.A[4] - X_t).squaredNorm() / denom;

    Eigen::MatrixXd delta = 2.0 * (f.A[4] - X_t) / denom;  // linear output layer
    for (int l = 3; l >= 0; --l) {
        g.dW[static_cast<size_t>(l)] = delta * f.A[static_cast<size_t>(l)].transpose();
        g.db[static_cast<size_t>(l)] = delta.rowwise().sum();
        if (l > 0) {
            delta = (ae.W[static_cast<size_t>(l)].transpose() * delta)
                        .cwiseProduct(leaky_grad(f.Z[static_cast<size_t>(l) - 1],
                                                 ae.leaky_slope));
        }
    }
    return g;
}

Autoencoder ae_train(const Eigen::MatrixXd& X, int latent_dim, uint64_t seed,
                     int epochs, int batch_size, double lr) {
    const int d = static_cast<int>(X.cols());
    const auto n = static_cast<size_t>(X.rows());
    if (latent_dim < 1 || latent_dim > d - 1) throw Error("AE dim must be in [1, d-1]");

    Autoencoder ae;
    ae.input_dim = d;
    ae.latent_dim = latent_dim;
    ae.hidden_dim = ae_hidden_dim(d, latent_dim);

    const int sizes[5] = {d, ae.hidden_dim, latent_dim, ae.hidden_dim, d};
    Rng rng(seed);
    for (int l = 0; l < 4; ++l) {
        const int fan_in = sizes[l];
        const int fan_out = sizes[l + 1];
        const double limit = std::sqrt(6.0 / fan_in);  // He uniform
        Eigen::MatrixXd w(fan_out, fan_in);
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                w(i, j) = rng.uniform(-limit, limit);
            }
        }
        ae.W[static_cast<size_t>(l)] = std::move(w);
        ae.b[static_cast<size_t>(l)] = Eigen::VectorXd::Zero(fan_out);
    }

    // Adam state per layer.
    std::array<Eigen::MatrixXd, 4> mW, vW;
    std::array<Eigen::VectorXd, 4> mB, vB;
    for (size_t l = 0; l < 4; ++l) {
        mW[l] = Eigen::MatrixXd::Zero(ae.W[l].rows(), ae.W[l].cols());
        vW[l] = mW[l];
        mB[l] = Eigen::VectorXd::Zero(ae.b[l].size());
        vB[l] = mB[l];
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    long step = 0;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        const auto order = rng.permutation(n);
        for (size_t start = 0; start < n; start += static_cast<size_t>(batch_size)) {
            const size_t count = std::min(static_cast<size_t>(batch_size), n - start);
            Eigen::MatrixXd batch(static_cast<Eigen::Index>(count), d);
            for (size_t i = 0; i < count; ++i) {
                batch.row(static_cast<Eigen::Index>(i)) =
                    X.row(static_cast<Eigen::Index>(order[start + i]));
            }
            const AeGradients g = ae_backprop(ae, batch);
            if (!std::isfinite(g.loss)) {
                throw NonFiniteLoss("AE loss diverged at epoch " + std::to_string(epoch));
            }
            step++;
            const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            for (size_t l = 0; l < 4; ++l) {
                mW[l] = beta1 * mW[l] + (1.0 - beta1) * g.dW[l];
                vW[l] = beta2 * vW[l] + (1.0 - beta2) * g.dW[l].cwiseProduct(g.dW[l]);
                ae.W[l] -= lr * (mW[l] / bc1).cwiseQuotient(
                                    ((vW[l] / bc2).cwiseSqrt().array() + adam_eps).matrix());
                mB[l] = beta1 * mB[l] + (1.0 - beta1) * g.db[l];
                vB[l] = beta2 * vB[l] + (1.0 - beta2) * g.db[l].cwiseProduct(g.db[l]);
                ae.b[l] -= lr * (mB[l] / bc1).cwiseQuotient(
                                    ((vB[l] / bc2).cwiseSqrt().array() + adam_eps).matrix());
            }
        }
    }
    return ae;
}

}  // namespace flowrep
