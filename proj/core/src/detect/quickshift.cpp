#include "flowrep/detect/quickshift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "flowrep/errors.hpp"

namespace flowrep {

namespace {

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] =
                parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

}  // namespace

int quickshiftpp_mode_count_raw(const Eigen::MatrixXd& X, int knn_k, double beta) {
    const auto n = static_cast<size_t>(X.rows());
    const auto d = static_cast<double>(X.cols());
    if (knn_k < 2 || static_cast<size_t>(knn_k) > n) {
        throw InsufficientData("quickshift++ needs n >= knn_k >= 2");
    }

    // k nearest neighbors per point (brute force, O(n^2) time, O(nk) memory).
    std::vector<std::vector<int>> knn(n);
    std::vector<double> log_density(n);
    std::vector<double> dist_row(n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            dist_row[j] = (X.row(static_cast<Eigen::Index>(i)) -
                           X.row(static_cast<Eigen::Index>(j)))
                              .norm();
        }
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (dist_row[static_cast<size_t>(a)] != dist_row[static_cast<size_t>(b)]) {
                return dist_row[static_cast<size_t>(a)] < dist_row[static_cast<size_t>(b)];
            }
            return a < b;
        });
        // order[0] is the point itself (distance 0, smallest index tie-break
        // may pick a duplicate; either way skip one self entry).
        std::vector<int> neigh;
        for (int idx : order) {
            if (static_cast<size_t>(idx) == i) continue;
            neigh.push_back(idx);
            if (static_cast<int>(neigh.size()) == knn_k) break;
        }
        const double r_k = dist_row[static_cast<size_t>(neigh.back())];
        log_density[i] = r_k > 0.0
                             ? std::log(static_cast<double>(knn_k)) -
                                   std::log(static_cast<double>(n)) - d * std::log(r_k)
                             : std::numeric_limits<double>::infinity();
        knn[i] = std::move(neigh);
    }

    auto is_knn = [&](size_t a, int b) {
        return std::find(knn[a].begin(), knn[a].end(), b) != knn[a].end();
    };

    // Decreasing-density sweep growing cluster cores.
    std::vector<int> order(static_cast<int>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (log_density[static_cast<size_t>(a)] != log_density[static_cast<size_t>(b)]) {
            return log_density[static_cast<size_t>(a)] > log_density[static_cast<size_t>(b)];
        }
        return a < b;
    });

    UnionFind uf(n);
    std::vector<double> peak(n, 0.0);       // root -> founder density
    std::vector<int> region_of(n, -1);      // processed point -> region root
    std::vector<bool> processed(n, false);
    const double log_level = std::log1p(-beta);  // log(1 - beta)
    int regions = 0;

    for (int pi : order) {
        const auto i = static_cast<size_t>(pi);
        std::vector<int> eligible;
        bool any_processed_neighbor = false;
        auto consider = [&](int j) {
            if (!processed[static_cast<size_t>(j)]) return;
            any_processed_neighbor = true;
            // Core membership requires a mutual-kNN edge and the density rule.
            if (!(is_knn(i, j) && is_knn(static_cast<size_t>(j), pi))) return;
            const int root = uf.find(region_of[static_cast<size_t>(j)]);
            if (log_density[i] >= log_level + peak[static_cast<size_t>(root)]) {
                eligible.push_back(root);
            }
        };
        for (int j : knn[i]) consider(j);
        for (size_t j = 0; j < n; ++j) {
            if (j != i && is_knn(j, pi) && !is_knn(i, static_cast<int>(j))) {
                consider(static_cast<int>(j));
            }
        }

        if (!eligible.empty()) {
            std::sort(eligible.begin(), eligible.end());
            eligible.erase(std::unique(eligible.begin(), eligible.end()), eligible.end());
            int root = eligible[0];
            for (size_t e = 1; e < eligible.size(); ++e) {
                const int other = uf.find(eligible[e]);
                if (other == uf.find(root)) continue;
                const double merged_peak =
                    std::max(peak[static_cast<size_t>(uf.find(root))],
                             peak[static_cast<size_t>(other)]);
                uf.unite(other, root);
                peak[static_cast<size_t>(uf.find(root))] = merged_peak;
                regions--;
            }
            region_of[i] = uf.find(root);
        } else if (!any_processed_neighbor) {
            region_of[i] = pi;  // isolated so far: new core
            peak[i] = log_density[i];
            regions++;
        } else {
            // Below the core level: threads connectivity without founding.
            int best = -1;
            double best_density = -std::numeric_limits<double>::infinity();
            for (size_t j = 0; j < n; ++j) {
                if (!processed[j]) continue;
                if (!(is_knn(i, static_cast<int>(j)) || is_knn(j, pi))) continue;
                if (log_density[j] > best_density) {
                    best_density = log_density[j];
                    best = static_cast<int>(j);
                }
            }
            region_of[i] = uf.find(region_of[static_cast<size_t>(best)]);
        }
        processed[i] = true;
    }
    return regions;
}

int quickshiftpp_mode_count(const Eigen::MatrixXd& X, int knn_k, double beta) {
    return std::clamp(quickshiftpp_mode_count_raw(X, knn_k, beta), 2, 30);
}

}  // namespace flowrep
