#include <gtest/gtest.h>

#include "ghostumap/datasets.hpp"
#include "ghostumap/ghosts.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace ghostumap;

namespace {

DataMatrix small_blobs(std::size_t n = 200, std::uint64_t seed = 1) {
    BlobSpec spec;
    spec.n_points = n;
    spec.n_dims = 6;
    spec.n_centers = 3;
    spec.seed = seed;
    return make_blobs(spec);
}

Hyperparameters short_run(ReductionMode mode) {
    Hyperparameters h;
    h.n_epochs = 100;
    h.reduction = mode;
    if (mode == ReductionMode::halving) {
        h.lazy_gen = 0;
        h.halving_schedule = {10, 20, 30};
    }
    return h;
}

// Two points spanning the unit square so normalized and raw units coincide, with the
// ghosts of point 0 placed on the x axis at the given distances.
GhostState ghosts_at(const std::vector<double>& dists) {
    GhostState g;
    g.n_points = 2;
    g.n_ghosts = static_cast<int>(dists.size());
    g.positions.resize(2 * dists.size(), Vec2{1, 1});
    for (std::size_t k = 0; k < dists.size(); ++k) {
        g.positions[k] = {dists[k], 0};
    }
    g.alive = {1, 1};
    g.smoothed = {0, 0};
    g.dropped_at = {-1, -1};
    return g;
}

const std::vector<Vec2> unit_originals{{0, 0}, {1, 1}};

}

TEST(SampleCircle, StaysInsideDisk) {
    SplitStream rng(4);
    for (int i = 0; i < 10000; ++i) {
        auto p = sample_circle({2, -1}, 0.5, rng);
        ASSERT_LE(distance(p, {2, -1}), 0.5 + 1e-12);
    }
    auto p = sample_circle({2, -1}, 0, rng);
    EXPECT_EQ(p, (Vec2{2, -1}));
}

TEST(SampleCircle, UniformOverArea) {
    // Eight annuli of equal area must receive equal counts.
    SplitStream rng(8);
    std::vector<std::size_t> radial(8, 0), angular(8, 0);
    for (int i = 0; i < 80000; ++i) {
        auto p = sample_circle({0, 0}, 2, rng);
        double r2 = squared_norm(p) / 4;
        radial[std::min<std::size_t>(7, static_cast<std::size_t>(8 * r2))]++;
        double theta = std::atan2(p.y, p.x) + std::numbers::pi;
        angular[std::min<std::size_t>(7, static_cast<std::size_t>(8 * theta / (2 * std::numbers::pi)))]++;
    }
    EXPECT_LT(oracle::chi_square_uniform(radial), oracle::chi2_7dof_p001);
    EXPECT_LT(oracle::chi_square_uniform(angular), oracle::chi2_7dof_p001);
}

TEST(GenerateGhosts, PlacesWithinRadius) {
    auto data = small_blobs(100);
    auto h = validate_config(short_run(ReductionMode::none), 100);
    auto prepared = build_graph(data, h.n_neighbors);
    auto rng = RngStreams(h.seed).init();
    auto state = make_embedding_state(prepared.graph, initialize_embedding(data, h.init, rng), h);
    auto placement = RngStreams(h.seed).placement();
    auto g = generate_ghosts(state, h, placement);

    EXPECT_EQ(g.positions.size(), 100u * 16);
    EXPECT_EQ(g.alive_count(), 100u);
    auto t = normalization_for(state.positions);
    for (std::size_t i = 0; i < 100; ++i) {
        for (int k = 0; k < 16; ++k) {
            double off = g.initial_offsets[i * 16 + k];
            EXPECT_LE(off, h.radius + 1e-12);
            EXPECT_NEAR(off, t.distance(g.positions[i * 16 + k], state.positions[i]), 1e-12);
            EXPECT_EQ(g.streams[i * 16 + k], RngStreams(h.seed).ghost(i, k));
        }
    }
}

TEST(MeasureDistances, NearestRankMatchesSortOracle) {
    SplitStream rng(21);
    for (int it = 0; it < 10000; ++it) {
        std::size_t m = 1 + rng.below(40);
        std::vector<double> dists(m);
        for (auto& d : dists) {
            // Coarse values make ties common.
            d = it % 2 ? rng.uniform() : rng.below(5) / 5.0;
        }
        double s = it % 3 == 0 ? static_cast<double>(rng.below(static_cast<std::uint32_t>(m + 1))) / m : rng.uniform();
        auto g = ghosts_at(dists);
        auto measured = measure_distances(g, unit_originals, s);
        ASSERT_EQ(measured.d[0], oracle::nearest_rank(dists, s)) << "m=" << m << " s=" << s;
    }
}

TEST(MeasureDistances, SensitivityOneIsMaximum) {
    auto g = ghosts_at({0.1, 0.7, 0.3});
    EXPECT_DOUBLE_EQ(measure_distances(g, unit_originals, 1.0).d[0], 0.7);
    EXPECT_DOUBLE_EQ(measure_distances(g, unit_originals, 0.0).d[0], 0.1);
    EXPECT_EQ(sensitivity_rank(0.9, 16), 15u);
    EXPECT_EQ(sensitivity_rank(0.9, 10), 9u);
    EXPECT_EQ(sensitivity_rank(0.0, 10), 1u);
}

TEST(MeasureDistances, DroppedPointsReportFrozenValue) {
    auto g = ghosts_at({0.1, 0.7, 0.3});
    g.alive[0] = 0;
    g.smoothed[0] = 0.004;
    EXPECT_EQ(measure_distances(g, unit_originals, 0.9).d[0], 0.004);
}

TEST(Ema, RecurrenceMatchesDirectEvaluation) {
    SplitStream rng(5);
    for (double beta : {0.01, 0.2, 0.5, 1.0}) {
        GhostState g = ghosts_at({0});
        std::vector<double> seq;
        for (int t = 0; t < 60; ++t) {
            seq.push_back(rng.uniform());
            StabilityDistances cur;
            cur.d = {seq.back(), 0};
            ema_update(g, cur, beta);
            ASSERT_NEAR(g.smoothed[0], oracle::ema_direct(seq, beta), 1e-12);
        }
    }
}

TEST(Ema, FirstMeasurementSeeds) {
    GhostState g = ghosts_at({0});
    StabilityDistances cur;
    cur.d = {0.8, 0.2};
    ema_update(g, cur, 0.2);
    EXPECT_EQ(g.smoothed[0], 0.8);
    EXPECT_EQ(g.smoothed[1], 0.2);
}

TEST(Ema, DroppedPointsKeepValue) {
    GhostState g = ghosts_at({0});
    StabilityDistances cur;
    cur.d = {0.8, 0.2};
    ema_update(g, cur, 0.2);
    g.alive[1] = 0;
    cur.d = {0.0, 0.9};
    ema_update(g, cur, 0.2);
    EXPECT_EQ(g.smoothed[1], 0.2);
    EXPECT_DOUBLE_EQ(g.smoothed[0], 0.64);
}

// Half the points were dropped with a low frozen D; tau must average over all N.
TEST(AdaptiveDrop, ThresholdIncludesDroppedPoints) {
    GhostState g;
    g.n_points = 10;
    g.n_ghosts = 1;
    g.positions.resize(10);
    g.alive = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    g.smoothed = {0.01, 0.01, 0.01, 0.01, 0.01, 0.4, 0.6, 1.0, 1.0, 1.0};
    g.dropped_at = {50, 50, 50, 50, 50, -1, -1, -1, -1, -1};

    const double all_mean = (5 * 0.01 + 0.4 + 0.6 + 3.0) / 10;
    EXPECT_DOUBLE_EQ(dropping_threshold(g), all_mean);

    EXPECT_EQ(adaptive_drop(g, 60), 1u);
    EXPECT_FALSE(g.alive[5]);
    EXPECT_EQ(g.dropped_at[5], 60);
    EXPECT_TRUE(g.alive[6]);
    EXPECT_EQ(g.dropped_at[0], 50);
}

TEST(AdaptiveDrop, StrictComparison) {
    GhostState g;
    g.n_points = 2;
    g.n_ghosts = 1;
    g.positions.resize(2);
    g.alive = {1, 1};
    g.smoothed = {0.5, 0.5};
    g.dropped_at = {-1, -1};
    EXPECT_EQ(adaptive_drop(g, 0), 0u);
}

TEST(HalvingDrop, ThreeStepsLeaveOneEighth) {
    const std::size_t n = 800;
    GhostState g;
    g.n_points = n;
    g.n_ghosts = 2;
    g.alive.assign(n, 1);
    g.smoothed.assign(n, 0);
    g.dropped_at.assign(n, -1);
    std::vector<Vec2> originals(n);
    SplitStream rng(2);
    for (std::size_t i = 0; i < n; ++i) {
        originals[i] = {rng.uniform(), rng.uniform()};
        double spread = 0.01 * rng.uniform();
        g.positions.push_back(originals[i] + Vec2{spread, 0});
        g.positions.push_back(originals[i] - Vec2{spread, 0});
    }
    EXPECT_EQ(halving_drop(g, originals, 50), 400u);
    EXPECT_EQ(halving_drop(g, originals, 100), 200u);
    EXPECT_EQ(halving_drop(g, originals, 150), 100u);
    EXPECT_EQ(g.alive_count(), 100u);

    // Survivors have the largest variances.
    auto t = normalization_for(originals);
    double min_alive = 1e9, max_dropped = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = positional_variance(originals[i], g.ghosts_of(i), t);
        (g.alive[i] ? min_alive = std::min(min_alive, v) : max_dropped = std::max(max_dropped, v));
    }
    EXPECT_GE(min_alive, max_dropped);
}

TEST(HalvingDrop, TiesGoToLowerIndex) {
    GhostState g;
    g.n_points = 5;
    g.n_ghosts = 1;
    g.positions = {{0, 0}, {1, 1}, {0, 0}, {1, 1}, {0.5, 0.5}};
    g.alive.assign(5, 1);
    g.smoothed.assign(5, 0);
    g.dropped_at.assign(5, -1);
    std::vector<Vec2> originals = g.positions;
    EXPECT_EQ(halving_drop(g, originals, 0), 2u);
    EXPECT_EQ(g.alive, (std::vector<std::uint8_t>{0, 0, 1, 1, 1}));
}

TEST(PositionalVariance, KnownValue) {
    NormalizationTransform t;
    std::vector<Vec2> ghosts{{2, 0}};
    EXPECT_DOUBLE_EQ(positional_variance({0, 0}, ghosts, t), 1.0);
}

TEST(GhostRun, OriginalsUnaffectedInEveryMode) {
    auto data = small_blobs(150);
    std::vector<std::vector<Vec2>> vanilla;
    auto h = short_run(ReductionMode::none);
    run_vanilla(data, h, [&](int, std::span<const Vec2> p) { vanilla.emplace_back(p.begin(), p.end()); });

    for (auto mode : {ReductionMode::none, ReductionMode::halving, ReductionMode::adaptive}) {
        std::size_t epoch = 0;
        bool identical = true;
        auto run = run_ghostumap(data, short_run(mode), [&](int, std::span<const Vec2> p) {
            identical = identical && std::equal(p.begin(), p.end(), vanilla[epoch].begin());
            ++epoch;
        });
        EXPECT_TRUE(identical) << to_string(mode);
        EXPECT_EQ(epoch, vanilla.size());
        EXPECT_EQ(run.positions, vanilla.back());
    }
}

TEST(GhostRun, AliveGhostsFollowTheUnreducedTrajectory) {
    // Ghosts only read the originals and draw from their own streams, so a point that
    // keeps its ghosts ends with exactly the distance of the run without reduction.
    auto data = small_blobs(150, 3);
    auto none = run_ghostumap(data, short_run(ReductionMode::none));
    auto adaptive = run_ghostumap(data, short_run(ReductionMode::adaptive));
    ASSERT_LT(adaptive.ghosts.alive_count(), 150u);
    for (std::size_t i = 0; i < 150; ++i) {
        if (!adaptive.dropped(i)) {
            EXPECT_EQ(adaptive.distances.d[i], none.distances.d[i]);
        }
    }
}

TEST(GhostRun, AdaptiveWithoutDropsEqualsNone) {
    auto data = small_blobs(100);
    auto h = short_run(ReductionMode::adaptive);
    h.drop_start = 1.0;
    auto adaptive = run_ghostumap(data, h);
    auto none = run_ghostumap(data, short_run(ReductionMode::none));
    EXPECT_EQ(adaptive.ghosts.alive_count(), 100u);
    EXPECT_EQ(adaptive.distances.d, none.distances.d);
    EXPECT_EQ(adaptive.ghosts.positions, none.ghosts.positions);
}

TEST(GhostRun, LazyGenerationAndHistory) {
    auto data = small_blobs(100);
    auto run = run_ghostumap(data, short_run(ReductionMode::adaptive));
    EXPECT_EQ(run.ghosts.generated_at_epoch, 20);
    EXPECT_EQ(run.alive_history.size(), 80u);
    for (std::size_t e = 0; e < 20; ++e) {
        EXPECT_EQ(run.alive_history[e], 100u);
    }
    for (std::size_t e = 1; e < run.alive_history.size(); ++e) {
        EXPECT_LE(run.alive_history[e], run.alive_history[e - 1]);
    }
    for (std::size_t i = 0; i < 100; ++i) {
        if (run.dropped(i)) {
            EXPECT_GE(run.ghosts.dropped_at[i], 40);
            EXPECT_EQ(run.distances.d[i], run.ghosts.smoothed[i]);
        }
    }
}

TEST(GhostRun, HalvingSurvivors) {
    auto data = small_blobs(200);
    auto run = run_ghostumap(data, short_run(ReductionMode::halving));
    EXPECT_EQ(run.ghosts.alive_count(), 25u);
}

TEST(GhostRun, Deterministic) {
    auto data = small_blobs(100);
    auto a = run_ghostumap(data, short_run(ReductionMode::adaptive));
    auto b = run_ghostumap(data, short_run(ReductionMode::adaptive));
    EXPECT_EQ(a.distances.d, b.distances.d);
    EXPECT_EQ(a.ghosts.positions, b.ghosts.positions);
    EXPECT_EQ(a.ghosts.alive, b.ghosts.alive);
}

TEST(GhostEpoch, IndependentOfThreadCount) {
    auto data = small_blobs(120);
    auto h = validate_config(short_run(ReductionMode::none), 120);
    auto prepared = build_graph(data, h.n_neighbors);
    auto rng = RngStreams(h.seed).init();
    auto state = make_embedding_state(prepared.graph, initialize_embedding(data, h.init, rng), h);
    auto settings = make_optimizer_settings(h);
    for (int n = 0; n < 5; ++n) optimize_epoch_original(state, settings);
    auto placement = RngStreams(h.seed).placement();
    auto g1 = generate_ghosts(state, h, placement);
    auto g4 = g1;

    for (int n = 0; n < 10; ++n) {
        optimize_epoch_original(state, settings);
        settings.threads = 1;
        optimize_epoch_ghosts(g1, state, settings);
        settings.threads = 4;
        optimize_epoch_ghosts(g4, state, settings);
    }
    EXPECT_EQ(g1.positions, g4.positions);
}

TEST(GhostEpoch, IdenticalGhostsStayIdentical) {
    // Ghosts sharing position and stream receive exactly the same updates.
    auto data = small_blobs(80);
    auto h = validate_config(short_run(ReductionMode::none), 80);
    auto prepared = build_graph(data, h.n_neighbors);
    auto rng = RngStreams(h.seed).init();
    auto state = make_embedding_state(prepared.graph, initialize_embedding(data, h.init, rng), h);
    auto settings = make_optimizer_settings(h);
    auto placement = RngStreams(h.seed).placement();
    auto g = generate_ghosts(state, h, placement);
    g.positions[1] = g.positions[0];
    g.streams[1] = g.streams[0];

    bool moved = false;
    const Vec2 start = g.positions[0];
    for (int n = 0; n < 20; ++n) {
        optimize_epoch_original(state, settings);
        optimize_epoch_ghosts(g, state, settings);
        ASSERT_EQ(g.positions[0], g.positions[1]);
        moved = moved || !(g.positions[0] == start);
    }
    EXPECT_TRUE(moved);
}

TEST(GhostEpoch, DroppedGhostsFrozen) {
    auto data = small_blobs(80);
    auto h = validate_config(short_run(ReductionMode::none), 80);
    auto prepared = build_graph(data, h.n_neighbors);
    auto rng = RngStreams(h.seed).init();
    auto state = make_embedding_state(prepared.graph, initialize_embedding(data, h.init, rng), h);
    auto settings = make_optimizer_settings(h);
    auto placement = RngStreams(h.seed).placement();
    auto g = generate_ghosts(state, h, placement);
    g.alive[3] = 0;
    auto before = std::vector<Vec2>(g.ghosts_of(3).begin(), g.ghosts_of(3).end());
    for (int n = 0; n < 5; ++n) {
        optimize_epoch_original(state, settings);
        optimize_epoch_ghosts(g, state, settings);
    }
    EXPECT_TRUE(std::equal(before.begin(), before.end(), g.ghosts_of(3).begin()));
}
