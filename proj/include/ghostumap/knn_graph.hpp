#ifndef GHOSTUMAP_KNN_GRAPH_HPP
#define GHOSTUMAP_KNN_GRAPH_HPP

#include "core.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

/**
 * @file knn_graph.hpp
 *
 * @brief Construction of the weighted fuzzy kNN graph from high-dimensional data.
 */

namespace ghostumap {

/**
 * @brief Exact Euclidean k-nearest neighbors, stored row-major (N x k).
 */
struct KnnIndex {
    std::size_t n_points = 0;
    int k = 0;
    std::vector<std::uint32_t> neighbor_ids;
    std::vector<double> neighbor_dists;

    std::uint32_t id(std::size_t i, int j) const { return neighbor_ids[i * k + j]; }
    double dist(std::size_t i, int j) const { return neighbor_dists[i * k + j]; }
};

/**
 * Brute-force kNN: every pair of rows is compared. Ties are broken in favor of the
 * lower index, and a point is never its own neighbor. Rows are distributed over
 * `threads` workers; the result does not depend on the thread count.
 */
inline KnnIndex exact_knn(const DataMatrix& data, int k, int threads = 1) {
    const std::size_t n = data.n_points();
    if (k < 1 || static_cast<std::size_t>(k) >= n) {
        throw ConfigError("n_neighbors", "k must lie in [1, n_points), got " + std::to_string(k));
    }

    KnnIndex out;
    out.n_points = n;
    out.k = k;
    out.neighbor_ids.resize(n * k);
    out.neighbor_dists.resize(n * k);

    const std::size_t dims = data.n_dims();
    parallel_for(n, threads, [&](std::size_t start, std::size_t end) {
        std::vector<std::pair<double, std::uint32_t>> candidates(n - 1);
        for (std::size_t i = start; i < end; ++i) {
            auto xi = data.row(i);
            std::size_t c = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) {
                    continue;
                }
                auto xj = data.row(j);
                double d2 = 0;
                for (std::size_t d = 0; d < dims; ++d) {
                    double diff = xi[d] - xj[d];
                    d2 += diff * diff;
                }
                candidates[c++] = {d2, static_cast<std::uint32_t>(j)};
            }
            // Pairs compare by distance first, then by index.
            std::partial_sort(candidates.begin(), candidates.begin() + k, candidates.end());
            for (int j = 0; j < k; ++j) {
                out.neighbor_ids[i * k + j] = candidates[j].second;
                out.neighbor_dists[i * k + j] = std::sqrt(candidates[j].first);
            }
        }
    });

    return out;
}

/**
 * @brief Per-point local connectivity parameters rho (nearest distance) and sigma (bandwidth).
 */
struct SmoothedLocality {
    std::vector<double> rho;
    std::vector<double> sigma;
    /// Points whose bisection ended without meeting the tolerance.
    std::size_t n_unconverged = 0;
};

/**
 * For each point, rho is the distance to its nearest neighbor and sigma solves
 * `sum_j exp(-max(0, d_ij - rho) / sigma) = log2(k)` by bisection over [1e-8, 1e4].
 */
inline SmoothedLocality smooth_locality(const KnnIndex& knn) {
    constexpr int max_iter = 64;
    constexpr double tol = 1e-5;
    constexpr double lo_start = 1e-8, hi_start = 1e4;

    const std::size_t n = knn.n_points;
    const int k = knn.k;
    const double target = std::log2(static_cast<double>(k));

    SmoothedLocality out;
    out.rho.resize(n);
    out.sigma.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const double rho = knn.dist(i, 0);
        out.rho[i] = rho;

        auto total = [&](double sigma) {
            double s = 0;
            for (int j = 0; j < k; ++j) {
                s += std::exp(-std::max(0.0, knn.dist(i, j) - rho) / sigma);
            }
            return s;
        };

        double lo = lo_start, hi = hi_start, mid = 0.5 * (lo + hi);
        bool converged = false;
        for (int it = 0; it < max_iter; ++it) {
            mid = 0.5 * (lo + hi);
            double s = total(mid);
            if (std::abs(s - target) < tol) {
                converged = true;
                break;
            }
            // The sum increases with sigma.
            if (s > target) {
                hi = mid;
            } else {
                lo = mid;
            }
        }

        // When every neighbor sits at rho, the sum is k regardless of sigma.
        bool flat = knn.dist(i, k - 1) <= rho;
        if (!converged && !flat) {
            ++out.n_unconverged;
        }
        out.sigma[i] = mid;
    }

    return out;
}

/**
 * @brief One weighted directed kNN edge `from -> to`.
 */
struct DirectedEdge {
    std::uint32_t from;
    std::uint32_t to;
    double weight;
};

/// `exp(-max(0, d - rho) / sigma)`.
inline double membership(double d, double rho, double sigma) {
    return std::exp(-std::max(0.0, d - rho) / sigma);
}

/**
 * Directed membership strengths v_{j|i} for every kNN entry. Entries whose weight
 * underflows to zero are omitted.
 */
inline std::vector<DirectedEdge> directed_weights(const KnnIndex& knn, const SmoothedLocality& loc) {
    std::vector<DirectedEdge> out;
    out.reserve(knn.neighbor_ids.size());
    for (std::size_t i = 0; i < knn.n_points; ++i) {
        for (int j = 0; j < knn.k; ++j) {
            double v = membership(knn.dist(i, j), loc.rho[i], loc.sigma[i]);
            if (v > 0) {
                out.push_back({static_cast<std::uint32_t>(i), knn.id(i, j), v});
            }
        }
    }
    return out;
}

/**
 * @brief Symmetric fuzzy graph, each unordered pair stored once with `i < j`.
 */
struct FuzzyGraph {
    struct Edge {
        std::uint32_t i;
        std::uint32_t j;
        double v;
    };

    std::size_t n_points = 0;
    std::vector<Edge> edges;
    double max_weight = 0;
};

/// Probabilistic t-conorm `a + b - a * b`.
inline double fuzzy_union(double a, double b) {
    return a + b - a * b;
}

/**
 * Combine directed weights into undirected ones with the probabilistic t-conorm;
 * a missing direction counts as zero. Output edges are sorted by (i, j).
 */
inline FuzzyGraph symmetrize(std::size_t n_points, std::vector<DirectedEdge> directed) {
    for (auto& e : directed) {
        if (e.from > e.to) {
            std::swap(e.from, e.to);
        }
    }
    std::sort(directed.begin(), directed.end(), [](const DirectedEdge& a, const DirectedEdge& b) {
        return a.from < b.from || (a.from == b.from && a.to < b.to);
    });

    FuzzyGraph g;
    g.n_points = n_points;
    for (std::size_t s = 0; s < directed.size();) {
        std::size_t t = s + 1;
        double v = directed[s].weight;
        while (t < directed.size() && directed[t].from == directed[s].from && directed[t].to == directed[s].to) {
            v = fuzzy_union(v, directed[t].weight);
            ++t;
        }
        v = std::min(v, 1.0);
        g.edges.push_back({directed[s].from, directed[s].to, v});
        g.max_weight = std::max(g.max_weight, v);
        s = t;
    }
    return g;
}

/**
 * @brief Everything produced by the graph construction phase.
 */
struct PreparedGraph {
    KnnIndex knn;
    SmoothedLocality locality;
    FuzzyGraph graph;
};

inline PreparedGraph build_graph(const DataMatrix& data, int n_neighbors, int threads = 1) {
    PreparedGraph out;
    out.knn = exact_knn(data, n_neighbors, threads);
    out.locality = smooth_locality(out.knn);
    out.graph = symmetrize(data.n_points(), directed_weights(out.knn, out.locality));
    return out;
}

}

#endif
