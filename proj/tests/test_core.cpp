#include <gtest/gtest.h>

#include "ghostumap/core.hpp"

#include <limits>

using namespace ghostumap;

namespace {

std::string failing_field(const Hyperparameters& h, std::size_t n = 100) {
    try {
        validate_config(h, n);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

}

TEST(DataMatrix, Validates) {
    EXPECT_NO_THROW(DataMatrix(2, 1, {0.0, 1.0}));
    EXPECT_THROW(DataMatrix(1, 1, {0.0}), DataError);
    EXPECT_THROW(DataMatrix(2, 0, {}), DataError);
    EXPECT_THROW(DataMatrix(2, 2, {0.0, 1.0, 2.0}), DataError);
    EXPECT_THROW(DataMatrix(2, 1, {0.0, std::numeric_limits<double>::quiet_NaN()}), DataError);
    EXPECT_THROW(DataMatrix(2, 1, {0.0, std::numeric_limits<double>::infinity()}), DataError);
    EXPECT_THROW(DataMatrix(2, 1, {0.0, 1.0}, {0}), DataError);
    EXPECT_THROW(DataMatrix(2, 1, {0.0, 1.0}, {0, 2}, {"a", "b"}), DataError);

    DataMatrix m(3, 2, {1, 2, 3, 4, 5, 6}, {0, 1, 0}, {"x", "y"});
    EXPECT_EQ(m.row(1)[0], 3);
    EXPECT_EQ(m.row(2)[1], 6);
    EXPECT_TRUE(m.has_labels());
}

TEST(Hyperparameters, Defaults) {
    Hyperparameters h;
    EXPECT_EQ(h.n_ghosts, 16);
    EXPECT_EQ(h.radius, 0.1);
    EXPECT_EQ(h.lazy_gen, 0.2);
    EXPECT_EQ(h.drop_start, 0.4);
    EXPECT_EQ(h.beta, 0.2);
    EXPECT_EQ(h.sensitivity, 0.9);
    EXPECT_EQ(h.n_neighbors, 15);
    EXPECT_EQ(h.min_dist, 0.1);
    EXPECT_EQ(h.reduction, ReductionMode::adaptive);
    EXPECT_EQ(h.halving_schedule, (std::vector<int>{50, 100, 150}));
}

TEST(ValidateConfig, ResolvesEpochs) {
    Hyperparameters h;
    EXPECT_EQ(validate_config(h, 10000).n_epochs, 500);
    EXPECT_EQ(validate_config(h, 10001).n_epochs, 200);
    auto r = validate_config(h, 1000);
    EXPECT_EQ(r.ghost_generation_epoch(), 100);
    EXPECT_EQ(r.drop_start_epoch(), 200);
    EXPECT_EQ(validate_config(r, 1000), r);
}

TEST(ValidateConfig, NamesTheOffendingField) {
    Hyperparameters h;
    h.radius = 1.5;
    EXPECT_EQ(failing_field(h), "radius");
    h = {};
    h.radius = -0.1;
    EXPECT_EQ(failing_field(h), "radius");
    h = {};
    h.n_ghosts = 0;
    EXPECT_EQ(failing_field(h), "n_ghosts");
    h = {};
    h.n_neighbors = 100;
    EXPECT_EQ(failing_field(h, 100), "n_neighbors");
    h = {};
    h.beta = 0;
    EXPECT_EQ(failing_field(h), "beta");
    h = {};
    h.sensitivity = 1.01;
    EXPECT_EQ(failing_field(h), "sensitivity");
    h = {};
    h.lazy_gen = 0.5;
    h.drop_start = 0.4;
    EXPECT_EQ(failing_field(h), "drop_start");
    h = {};
    h.lazy_gen = 0.4;
    h.drop_start = 0.4;
    EXPECT_EQ(failing_field(h), "drop_start");
    h = {};
    h.min_dist = 0;
    EXPECT_EQ(failing_field(h), "min_dist");
    h = {};
    h.reduction = ReductionMode::halving;
    h.lazy_gen = 0;
    h.halving_schedule = {50, 50};
    EXPECT_EQ(failing_field(h), "halving_schedule");
    h.n_epochs = 100;
    h.halving_schedule = {50, 100};
    EXPECT_EQ(failing_field(h), "halving_schedule");
    // Only checked when halving is selected.
    h.reduction = ReductionMode::adaptive;
    h.lazy_gen = 0.2;
    EXPECT_EQ(failing_field(h), "");
    h = {};
    h.reduction = ReductionMode::halving;
    EXPECT_EQ(failing_field(h), "halving_schedule");
    h.lazy_gen = 0;
    EXPECT_EQ(failing_field(h), "");
    EXPECT_THROW(validate_config(Hyperparameters{}, 1), ConfigError);
}

TEST(ValidateConfig, BoundaryValuesAccepted) {
    Hyperparameters h;
    h.radius = 0;
    EXPECT_EQ(failing_field(h), "");
    h.radius = 1;
    h.sensitivity = 1;
    h.beta = 1;
    h.drop_start = 1;
    EXPECT_EQ(failing_field(h), "");
}

TEST(Normalization, MapsIntoUnitSquare) {
    std::vector<Vec2> pts{{-2, 1}, {6, 3}, {0, -1}};
    auto t = normalization_for(pts);
    EXPECT_EQ(t.extent, 8);
    EXPECT_EQ(t.apply({-2, -1}).x, 0);
    EXPECT_EQ(t.apply({6, -1}).x, 1);
    EXPECT_DOUBLE_EQ(t.apply({0, 3}).y, 0.5);
    EXPECT_DOUBLE_EQ(t.distance({0, 0}, {4, 0}), 0.5);
    for (const auto& p : pts) {
        auto q = t.apply(p);
        EXPECT_GE(q.x, 0);
        EXPECT_LE(q.x, 1);
        EXPECT_GE(q.y, 0);
        EXPECT_LE(q.y, 1);
    }
}

TEST(Normalization, DegenerateExtentIsOne) {
    std::vector<Vec2> pts{{3, 3}, {3, 3}};
    auto t = normalization_for(pts);
    EXPECT_EQ(t.extent, 1);
    EXPECT_EQ(t.apply({3, 3}).x, 0);
}
