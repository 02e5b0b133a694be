#include <gtest/gtest.h>

#include "ghostumap/datasets.hpp"
#include "ghostumap/knn_graph.hpp"
#include "oracles.hpp"

#include <cmath>
#include <map>

using namespace ghostumap;

namespace {

DataMatrix grid_or_uniform(std::size_t n, std::size_t dims, std::uint64_t seed, bool integer_grid = false) {
    SplitStream rng(seed);
    std::vector<double> v(n * dims);
    for (auto& x : v) {
        // A coarse grid forces many exact distance ties.
        x = integer_grid ? static_cast<double>(rng.below(4)) : 10 * rng.uniform() - 5;
    }
    return DataMatrix(n, dims, std::move(v));
}

}

TEST(ExactKnn, MatchesQuadraticOracle) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        for (bool grid : {false, true}) {
            auto data = grid_or_uniform(seed % 2 ? 500 : 137, 3 + seed, seed, grid);
            const int k = 10;
            auto knn = exact_knn(data, k, 1 + static_cast<int>(seed % 3));
            auto expected = oracle::brute_knn(data, k);
            for (std::size_t i = 0; i < data.n_points(); ++i) {
                for (int j = 0; j < k; ++j) {
                    ASSERT_EQ(knn.id(i, j), expected[i][j].second) << "point " << i << " rank " << j;
                    ASSERT_NEAR(knn.dist(i, j), expected[i][j].first, 1e-12);
                }
            }
        }
    }
}

TEST(ExactKnn, ThreadCountDoesNotMatter) {
    auto data = grid_or_uniform(300, 5, 7);
    auto a = exact_knn(data, 15, 1);
    auto b = exact_knn(data, 15, 4);
    EXPECT_EQ(a.neighbor_ids, b.neighbor_ids);
    EXPECT_EQ(a.neighbor_dists, b.neighbor_dists);
}

TEST(ExactKnn, RejectsTooManyNeighbors) {
    auto data = grid_or_uniform(10, 2, 1);
    EXPECT_THROW(exact_knn(data, 10), ConfigError);
    EXPECT_THROW(exact_knn(data, 0), ConfigError);
    EXPECT_NO_THROW(exact_knn(data, 9));
}

TEST(SmoothLocality, SolvesForSigma) {
    // Distances 1, 2, 2, 2 with k = 4: 1 + 3 exp(-1 / sigma) = log2(4) = 2, so sigma = 1 / ln 3.
    KnnIndex knn;
    knn.n_points = 1;
    knn.k = 4;
    knn.neighbor_ids = {1, 2, 3, 4};
    knn.neighbor_dists = {1, 2, 2, 2};
    auto loc = smooth_locality(knn);
    EXPECT_EQ(loc.rho[0], 1);
    EXPECT_NEAR(loc.sigma[0], 0.9102392266268373, 1e-4);
    EXPECT_EQ(loc.n_unconverged, 0u);
}

TEST(SmoothLocality, MembershipSumsToLog2K) {
    auto data = grid_or_uniform(200, 4, 3);
    const int k = 15;
    auto knn = exact_knn(data, k);
    auto loc = smooth_locality(knn);
    for (std::size_t i = 0; i < data.n_points(); ++i) {
        double total = 0;
        for (int j = 0; j < k; ++j) {
            total += membership(knn.dist(i, j), loc.rho[i], loc.sigma[i]);
        }
        EXPECT_NEAR(total, std::log2(k), 1e-4);
        EXPECT_EQ(loc.rho[i], knn.dist(i, 0));
    }
}

TEST(Symmetrize, TConormBounds) {
    SplitStream rng(17);
    for (int it = 0; it < 100000; ++it) {
        double a = rng.uniform(), b = rng.uniform();
        double u = fuzzy_union(a, b);
        ASSERT_GE(u, std::max(a, b) - 1e-15);
        ASSERT_LE(u, std::min(1.0, a + b) + 1e-15);
        ASSERT_EQ(u, fuzzy_union(b, a));
    }
    EXPECT_EQ(fuzzy_union(0.3, 0), 0.3);
    EXPECT_DOUBLE_EQ(fuzzy_union(1, 0.4), 1);
}

TEST(Symmetrize, CombinesBothDirections) {
    std::vector<DirectedEdge> directed{{0, 1, 0.5}, {1, 0, 0.4}, {2, 0, 0.25}, {1, 2, 1.0}};
    auto g = symmetrize(3, directed);
    ASSERT_EQ(g.edges.size(), 3u);
    EXPECT_EQ(g.edges[0].i, 0u);
    EXPECT_EQ(g.edges[0].j, 1u);
    EXPECT_DOUBLE_EQ(g.edges[0].v, 0.7);
    EXPECT_EQ(g.edges[1].j, 2u);
    EXPECT_DOUBLE_EQ(g.edges[1].v, 0.25);
    EXPECT_EQ(g.edges[2].i, 1u);
    EXPECT_EQ(g.max_weight, 1.0);
}

TEST(Symmetrize, GraphPropertiesOnRealData) {
    BlobSpec spec;
    spec.n_points = 300;
    auto data = make_blobs(spec);
    auto prepared = build_graph(data, 15);

    std::map<std::pair<std::uint32_t, std::uint32_t>, double> directed;
    for (const auto& e : directed_weights(prepared.knn, prepared.locality)) {
        directed[{e.from, e.to}] = e.weight;
    }
    for (std::size_t s = 0; s < prepared.graph.edges.size(); ++s) {
        const auto& e = prepared.graph.edges[s];
        ASSERT_LT(e.i, e.j);
        if (s) {
            const auto& p = prepared.graph.edges[s - 1];
            ASSERT_TRUE(p.i < e.i || (p.i == e.i && p.j < e.j));
        }
        double a = directed.count({e.i, e.j}) ? directed[{e.i, e.j}] : 0;
        double b = directed.count({e.j, e.i}) ? directed[{e.j, e.i}] : 0;
        EXPECT_NEAR(e.v, a + b - a * b, 1e-15);
        EXPECT_GT(e.v, 0);
        EXPECT_LE(e.v, 1);
    }
}
