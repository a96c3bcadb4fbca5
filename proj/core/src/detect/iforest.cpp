#include "flowrep/detect/iforest.hpp"

#include <cmath>

#include "flowrep/errors.hpp"
#include "flowrep/rng.hpp"

namespace flowrep {

double iforest_c_factor(int psi) {
    if (psi <= 1) return 0.0;
    double harmonic = 0.0;
    for (int i = 1; i <= psi - 1; ++i) harmonic += 1.0 / i;
    return 2.0 * harmonic - 2.0 * (psi - 1) / static_cast<double>(psi);
}

double IsoTree::path_length(const Eigen::VectorXd& x) const {
    int node = 0;
    int depth = 0;
    while (nodes[static_cast<size_t>(node)].feature >= 0) {
        const IsoNode& nd = nodes[static_cast<size_t>(node)];
        node = x[nd.feature] < nd.threshold ? nd.left : nd.right;
        depth++;
    }
    return depth + iforest_c_factor(nodes[static_cast<size_t>(node)].size);
}

double IsolationForest::anomaly_score(const Eigen::VectorXd& x) const {
    double total = 0.0;
    for (const IsoTree& t : trees) total += t.path_length(x);
    const double mean_path = total / static_cast<double>(trees.size());
    return std::pow(2.0, -mean_path / c_psi);
}

double IsolationForest::score(const Eigen::VectorXd& x) const {
    return -anomaly_score(x);
}

namespace {

int build_node(IsoTree& tree, const Eigen::MatrixXd& X, std::vector<int>& rows,
               int begin, int end, int depth, int height_cap, Rng& rng) {
    const int size = end - begin;
    const auto idx = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    if (size <= 1 || depth >= height_cap) {
        tree.nodes[static_cast<size_t>(idx)].size = size;
        return idx;
    }

    // Candidate features are those not constant on this node.
    const auto d = static_cast<int>(X.cols());
    std::vector<int> usable;
    for (int f = 0; f < d; ++f) {
        double lo = X(rows[static_cast<size_t>(begin)], f);
        double hi = lo;
        for (int r = begin + 1; r < end; ++r) {
            const double v = X(rows[static_cast<size_t>(r)], f);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi > lo) usable.push_back(f);
    }
    if (usable.empty()) {
        tree.nodes[static_cast<size_t>(idx)].size = size;
        return idx;
    }

    const int feature = usable[static_cast<size_t>(
        rng.uniform_int(0, static_cast<int>(usable.size()) - 1))];
    double lo = X(rows[static_cast<size_t>(begin)], feature);
    double hi = lo;
    for (int r = begin + 1; r < end; ++r) {
        const double v = X(rows[static_cast<size_t>(r)], feature);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double threshold = rng.uniform(lo, hi);

    auto mid_it = std::partition(rows.begin() + begin, rows.begin() + end, [&](int r) {
        return X(r, feature) < threshold;
    });
    int mid = static_cast<int>(mid_it - rows.begin());
    if (mid == begin || mid == end) {
        // Degenerate draw (threshold at the boundary): split off one row.
        mid = begin + 1;
        for (int r = begin; r < end; ++r) {
            if (X(rows[static_cast<size_t>(r)], feature) == lo) {
                std::swap(rows[static_cast<size_t>(begin)], rows[static_cast<size_t>(r)]);
                break;
            }
        }
    }

    tree.nodes[static_cast<size_t>(idx)].feature = feature;
    tree.nodes[static_cast<size_t>(idx)].threshold = threshold;
    const int left = build_node(tree, X, rows, begin, mid, depth + 1, height_cap, rng);
    const int right = build_node(tree, X, rows, mid, end, depth + 1, height_cap, rng);
    tree.nodes[static_cast<size_t>(idx)].left = left;
    tree.nodes[static_cast<size_t>(idx)].right = right;
    return idx;
}

}  // namespace

IsolationForest if_train(const Eigen::MatrixXd& X, int n_trees, int subsample,
                         uint64_t seed) {
    if (n_trees < 1) throw Error("isolation forest needs n_trees >= 1");
    if (X.rows() < 1) throw InsufficientData("isolation forest needs data");

    IsolationForest forest;
    forest.n_trees = n_trees;
    forest.seed = seed;
    const int n = static_cast<int>(X.rows());
    const int psi = std::min(subsample, n);
    forest.subsample = psi;
    forest.c_psi = iforest_c_factor(psi);
    if (forest.c_psi <= 0.0) forest.c_psi = 1.0;  // psi == 1 degenerate case
    const int height_cap =
        std::max(1, static_cast<int>(std::ceil(std::log2(static_cast<double>(psi)))));

    forest.trees.reserve(static_cast<size_t>(n_trees));
    for (int t = 0; t < n_trees; ++t) {
        Rng rng(mix_seed(seed, static_cast<uint64_t>(t)));
        auto perm = rng.permutation(static_cast<size_t>(n));
        std::vector<int> rows(static_cast<size_t>(psi));
        for (int i = 0; i < psi; ++i) rows[static_cast<size_t>(i)] = static_cast<int>(perm[static_cast<size_t>(i)]);

        IsoTree tree;
        build_node(tree, X, rows, 0, psi, 0, height_cap, rng);
        forest.trees.push_back(std::move(tree));
    }
    return forest;
}

}  // namespace flowrep
