#include <gtest/gtest.h>

#include <random>

#include "pairpump/grid.hpp"

using namespace pairpump;

TEST(Grid, LatticeLayout) {
    const auto g = make_grid(8, 2.0);
    EXPECT_DOUBLE_EQ(g->dz(), 0.25);
    EXPECT_DOUBLE_EQ(g->position(0), -1.0);
    EXPECT_DOUBLE_EQ(g->position(7), 0.75);
    EXPECT_EQ(g->signed_index(3), 3);
    EXPECT_EQ(g->signed_index(4), -4);
    EXPECT_EQ(g->signed_index(7), -1);
    EXPECT_DOUBLE_EQ(g->momentum(1), kPi);
    EXPECT_DOUBLE_EQ(g->momentum(4), -4.0 * kPi);
    EXPECT_DOUBLE_EQ(g->max_momentum(), 4.0 * kPi);
}

TEST(Grid, SlotLookup) {
    const auto g = make_grid(16, 3.0);
    for (std::size_t m = 0; m < 16; ++m) {
        EXPECT_EQ(g->slot_of_index(g->signed_index(m)), m);
        EXPECT_EQ(g->slot_of_momentum(g->momentum(m)), m);
    }
    EXPECT_FALSE(g->slot_of_index(8).has_value());
    EXPECT_FALSE(g->slot_of_momentum(0.5 * g->momentum(1)).has_value());
}

TEST(Grid, RejectsBadSizes) {
    EXPECT_THROW(SpatialGrid(7, 1.0), ArgumentError);
    EXPECT_THROW(SpatialGrid(2, 1.0), ArgumentError);
    EXPECT_THROW(SpatialGrid(8, 0.0), ArgumentError);
    EXPECT_THROW(SpatialGrid(8, -1.0), ArgumentError);
}

TEST(Grid, PlaneWaveMapsToOneCoefficient) {
    const auto g = make_grid(32, 2.5);
    const std::size_t slot = *g->slot_of_index(-5);
    SpinorField f(g);
    for (std::size_t j = 0; j < g->size(); ++j) {
        f.upper[j] = std::polar(1.0 / std::sqrt(g->box_length()), g->momentum(slot) * g->position(j));
        f.lower[j] = 2.0 * f.upper[j];
    }
    const auto m = to_momentum(f);
    for (std::size_t s = 0; s < g->size(); ++s) {
        const cplx eu = s == slot ? cplx{1.0} : cplx{};
        EXPECT_NEAR(std::abs(m.upper[s] - eu), 0.0, 1e-13);
        EXPECT_NEAR(std::abs(m.lower[s] - 2.0 * eu), 0.0, 1e-13);
    }
}

TEST(Grid, TransformRoundTripAndParseval) {
    const auto g = make_grid(64, 1.7);
    std::mt19937 rng(7);
    std::normal_distribution<double> nd;
    SpinorField f(g);
    for (std::size_t j = 0; j < g->size(); ++j) {
        f.upper[j] = {nd(rng), nd(rng)};
        f.lower[j] = {nd(rng), nd(rng)};
    }
    const auto m = to_momentum(f);
    EXPECT_NEAR(norm_squared(m), norm_squared(f), 1e-12 * norm_squared(f));
    const auto back = to_position(m);
    for (std::size_t j = 0; j < g->size(); ++j) {
        EXPECT_NEAR(std::abs(back.upper[j] - f.upper[j]), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(back.lower[j] - f.lower[j]), 0.0, 1e-12);
    }
}

TEST(Grid, InnerProductIsConjugateSymmetric) {
    const auto g = make_grid(16, 1.0);
    SpinorField a(g), b(g);
    for (std::size_t j = 0; j < 16; ++j) {
        a.upper[j] = {double(j), 1.0};
        b.lower[j] = {0.5, -double(j)};
        b.upper[j] = {1.0, 0.25 * j};
    }
    const cplx ab = inner_product(a, b);
    const cplx ba = inner_product(b, a);
    EXPECT_NEAR(std::abs(ab - std::conj(ba)), 0.0, 1e-12);
    EXPECT_NEAR(inner_product(a, a).real(), norm_squared(a), 1e-12);
}

TEST(Grid, MismatchedGridsRejected) {
    SpinorField a(make_grid(16, 1.0)), b(make_grid(16, 2.0));
    EXPECT_THROW(inner_product(a, b), ArgumentError);
}
