#include "flowrep/detect/kde.hpp"

#include "flowrep/errors.hpp"

namespace flowrep {

double KdeModel::score(const Eigen::VectorXd& x) const {
    if (x.size() != train.cols()) throw DimensionMismatch("KDE query width mismatch");
    const double inv = 1.0 / (2.0 * sigma * sigma);
    const Eigen::VectorXd sq =
        (train.rowwise() - x.transpose()).rowwise().squaredNorm();
    return (-sq.array() * inv).exp().mean();
}

KdeModel kde_train(const Eigen::MatrixXd& X, double sigma) {
    if (!(sigma > 0.0)) throw Error("KDE bandwidth must be positive");
    return KdeModel{sigma, X};
}

}  // namespace flowrep
