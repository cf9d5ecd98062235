#include <gtest/gtest.h>

#include "pairpump/observables.hpp"
#include "pairpump/propagator.hpp"

using namespace pairpump;

namespace {

struct Evolved {
    BasisSet negative, positive;
    std::vector<SpinorField> states;
};

Evolved evolve_modes(std::size_t n_z, double L, std::size_t keep, std::size_t pos_keep, double fraction) {
    const auto g = make_grid(n_z, L);
    Evolved e{build_basis(g, keep, Branch::negative), build_basis(g, pos_keep, Branch::positive), {}};
    const DriveMode d = WidthOscillation{from_c2(2.53), 0.0, from_lambda_c(10.0), from_c2(0.3), 0.3 * kComptonWavelength};
    const double T = period(d);
    const auto sched = make_schedule(fraction * T, T / 400);
    for (std::size_t n = 0; n < keep; ++n) e.states.push_back(evolve(e.negative.field(n), d, sched).final_state);
    return e;
}

} // namespace

TEST(Observables, NoPairsBeforeEvolution) {
    const auto g = make_grid(32, 0.5);
    const auto neg = build_basis(g, 16, Branch::negative);
    const auto pos = build_basis(g, 16, Branch::positive);
    const auto u = overlap_matrix(neg.fields(), pos);
    EXPECT_LT(pair_number(u), 1e-28);
}

TEST(Observables, ThreeWayConsistency) {
    const auto e = evolve_modes(128, 0.5, 64, 48, 0.5);
    const auto u = overlap_matrix(e.states, e.positive, 0.5);
    const double n = pair_number(u);
    ASSERT_GT(n, 1e-3);
    const auto el = electron_density(u, e.positive);
    const auto po = positron_density(u, e.negative);
    EXPECT_NEAR(el.total(), n, 1e-10 * n);
    EXPECT_NEAR(po.total(), n, 1e-10 * n);
    for (double x : el.values) EXPECT_GE(x, 0.0);
}

TEST(Observables, DensitiesIndependentOfWorkerCount) {
    const auto e = evolve_modes(64, 0.5, 32, 32, 0.5);
    const auto u = overlap_matrix(e.states, e.positive);
    const auto a = electron_density(u, e.positive, 1);
    const auto b = electron_density(u, e.positive, 3);
    const auto c = positron_density(u, e.negative, 1);
    const auto d = positron_density(u, e.negative, 4);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(c.values, d.values);
}

TEST(Observables, OverlapColumnMatchesInnerProduct) {
    const auto e = evolve_modes(64, 0.5, 4, 16, 0.3);
    const auto u = overlap_matrix(e.states, e.positive);
    for (std::size_t n = 0; n < 4; ++n)
        for (std::size_t p = 0; p < 16; ++p)
            EXPECT_NEAR(std::abs(u(p, n) - inner_product(e.positive.field(p), e.states[n])), 0.0, 1e-12);
}

TEST(Observables, ShapeChecks) {
    const auto g = make_grid(32, 0.5);
    const auto pos = build_basis(g, 8, Branch::positive);
    OverlapMatrix u(7, 3);
    EXPECT_THROW(electron_density(u, pos), ArgumentError);
    EXPECT_THROW(positron_density(u, pos), ArgumentError);
    std::vector<cplx> col(5);
    EXPECT_THROW(overlap_column(MomentumSpinor(g), pos, col), ArgumentError);
}

TEST(Observables, WellWindow) {
    const auto g = make_grid(100, 1.0);
    const auto w = well_window(*g, 0.1);
    EXPECT_NEAR(w.z_min, -0.1, 1e-12);
    EXPECT_NEAR(w.z_max, 0.1, 1e-12);
    EXPECT_EQ(w.last - w.first + 1, 21u);
    EXPECT_THROW(well_window(*g, 0.6), ArgumentError);
    EXPECT_THROW(well_window(*g, -0.1), ArgumentError);

    DensityProfile flat{g, Species::electron, 0.0, std::vector<double>(100, 2.0)};
    EXPECT_NEAR(flat.total(), 2.0, 1e-12);
    EXPECT_NEAR(in_well_number(flat, 0.1), 21 * 0.01 * 2.0, 1e-12);
}

TEST(Observables, PumpRate) {
    EXPECT_FALSE(pump_rate(0.0, 0.0).has_value());
    EXPECT_FALSE(pump_rate(1e-13, 0.0).has_value());
    EXPECT_DOUBLE_EQ(*pump_rate(2.0, 0.5), 0.75);
    EXPECT_DOUBLE_EQ(*pump_rate(1.0, 0.0), 1.0);
    EXPECT_THROW(pump_rate(1.0, 1.5), ArgumentError);
}

TEST(Observables, SaturationFitRecoversBeta) {
    std::vector<double> t, a;
    for (int i = 1; i <= 10; ++i) {
        t.push_back(1e-3 * i);
        a.push_back(1.0 - 2.5e-4 / t.back());
    }
    EXPECT_NEAR(*fit_saturation_beta(t, a), 2.5e-4, 1e-15);
    EXPECT_FALSE(fit_saturation_beta(std::vector<double>{}, std::vector<double>{}).has_value());
}
