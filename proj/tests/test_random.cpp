#include <gtest/gtest.h>

#include "ghostumap/random.hpp"
#include "oracles.hpp"

#include <set>

using namespace ghostumap;

TEST(SplitStream, DeriveIsPureFunctionOfKey) {
    auto a = SplitStream::derive(42, 3, 7, 1);
    auto b = SplitStream::derive(42, 3, 7, 1);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(a(), b());
    }
}

TEST(SplitStream, DistinctKeysGiveDistinctSequences) {
    std::set<std::uint64_t> firsts;
    for (std::uint64_t i = 0; i < 50; ++i) {
        for (std::uint64_t k = 0; k < 20; ++k) {
            auto s = SplitStream::derive(1, static_cast<std::uint64_t>(StreamTag::ghost), i, k);
            firsts.insert(s());
        }
    }
    EXPECT_EQ(firsts.size(), 1000u);

    RngStreams streams(9);
    EXPECT_NE(streams.original(), streams.init());
    EXPECT_NE(streams.ghost(0, 1), streams.ghost(1, 0));
    EXPECT_NE(streams.original_worker(0), streams.original());
}

TEST(SplitStream, StreamsDoNotShareDraws) {
    // Advancing one ghost stream must leave every other stream untouched.
    RngStreams streams(5);
    auto a = streams.ghost(3, 4);
    auto b = streams.ghost(3, 5);
    auto b_copy = b;
    for (int i = 0; i < 1000; ++i) a();
    EXPECT_EQ(b(), b_copy());
}

TEST(SplitStream, UniformInUnitInterval) {
    SplitStream s(11);
    double lo = 1, hi = 0, total = 0;
    for (int i = 0; i < 100000; ++i) {
        double u = s.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        total += u;
    }
    EXPECT_LT(lo, 1e-3);
    EXPECT_GT(hi, 1 - 1e-3);
    EXPECT_NEAR(total / 100000, 0.5, 0.01);
}

TEST(SplitStream, BelowIsUniform) {
    SplitStream s(3);
    std::vector<std::size_t> counts(8, 0);
    for (int i = 0; i < 80000; ++i) {
        auto v = s.below(8);
        ASSERT_LT(v, 8u);
        ++counts[v];
    }
    EXPECT_LT(oracle::chi_square_uniform(counts), oracle::chi2_7dof_p001);
}
