#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>

namespace flowrep {

/// 5-layer autoencoder d -> h -> dim -> h -> d with h = min(d-1, ceil(2 dim)),
/// LeakyReLU(0.01) after every non-output layer and a linear output. Trained
/// with mean-squared reconstruction loss under Adam.
struct Autoencoder {
    int input_dim = 0;
    int hidden_dim = 0;
    int latent_dim = 0;
    double leaky_slope = 0.01;
    // Layer l maps activations a_{l-1} -> W[l] a_{l-1} + b[l].
    std::array<Eigen::MatrixXd, 4> W;
    std::array<Eigen::VectorXd, 4> b;

    Eigen::VectorXd reconstruct(const Eigen::VectorXd& x) const;
    /// -||x - reconstruct(x)||^2
    double score(const Eigen::VectorXd& x) const;
};

int ae_hidden_dim(int d, int latent_dim);

struct AeGradients {
    std::array<Eigen::MatrixXd, 4> dW;
    std::array<Eigen::VectorXd, 4> db;
    double loss = 0.0;
};

/// Mean squared reconstruction error over a batch (rows are samples).
double ae_batch_loss(const Autoencoder& ae, const Eigen::MatrixXd& batch);

/// Analytic gradients of ae_batch_loss; checked against finite differences.
AeGradients ae_backprop(const Autoencoder& ae, const Eigen::MatrixXd& batch);

/// He-uniform initialized, seeded shuffling, Adam(1e-3, 0.9, 0.999), batch 32.
/// Throws NonFiniteLoss if the loss leaves the reals.
Autoencoder ae_train(const Eigen::MatrixXd& X, int latent_dim, uint64_t seed,
                     int epochs = 100, int batch_size = 32, double lr = 1e-3);

}  // namespace flowrep
