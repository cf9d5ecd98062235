#include <gtest/gtest.h>

#include "pairpump/experiment.hpp"

using namespace pairpump;

namespace {
ScenarioConfig small_width_run() {
    ScenarioConfig c;
    c.n_z = 64;
    c.box_length = 0.5;
    c.drive = WidthOscillation{from_c2(2.53), 0.0, from_lambda_c(10.0), from_c2(0.3), 0.3 * kComptonWavelength};
    c.cycles = 2;
    c.steps_per_cycle = 80;
    c.n_keep = 32;
    c.sample_every = 20;
    return c;
}
} // namespace

TEST(Experiment, ResolveTimeDividesThePeriod) {
    auto c = small_width_run();
    auto r = resolve_time(c);
    const double T = period(c.drive);
    EXPECT_EQ(r.steps_per_cycle, 80u);
    EXPECT_EQ(r.total_steps, 160u);
    EXPECT_NEAR(r.t_final, 2 * T, 1e-15);
    c.steps_per_cycle.reset();
    c.dt = T / 33.5;
    r = resolve_time(c);
    EXPECT_EQ(r.steps_per_cycle, 34u);
    EXPECT_LE(r.dt, *c.dt);
    c.dt.reset();
    r = resolve_time(c);
    EXPECT_LE(r.dt, default_time_step(c) * (1 + 1e-12));
}

TEST(Experiment, StaticRunUsesDuration) {
    ScenarioConfig c;
    c.n_z = 32;
    c.box_length = 0.5;
    c.drive = StaticWell{WellShape{from_c2(1.0), from_lambda_c(4.0)}};
    c.duration = 1e-4;
    c.dt = 3e-6;
    const auto r = resolve_time(c);
    EXPECT_EQ(r.total_steps, 34u);
    EXPECT_NEAR(r.dt * 34, 1e-4, 1e-18);
}

TEST(Experiment, NullDriveCreatesNothing) {
    auto c = small_width_run();
    std::get<WidthOscillation>(c.drive).width_max = 0.0;
    const auto r = run_scenario(c);
    for (const auto& s : r.series.samples) EXPECT_LT(s.pairs, 1e-20);
}

TEST(Experiment, SamplesAndFieldFreeFlags) {
    const auto c = small_width_run();
    const auto r = run_scenario(c);
    std::vector<std::size_t> steps;
    for (const auto& s : r.series.samples) steps.push_back(s.step);
    EXPECT_EQ(steps, (std::vector<std::size_t>{0, 20, 40, 60, 80, 100, 120, 140, 160}));
    for (const auto& s : r.series.samples) {
        EXPECT_EQ(s.field_free, s.step % 80 == 0);
        EXPECT_NEAR(s.electrons, s.pairs, 1e-8 * std::max(s.pairs, 1e-30));
        EXPECT_NEAR(s.positrons, s.pairs, 1e-8 * std::max(s.pairs, 1e-30));
        EXPECT_LE(s.in_well_electrons, s.electrons * (1 + 1e-12) + 1e-300);
    }
    EXPECT_GT(r.series.samples.back().pairs, 1e-3);
    EXPECT_LT(r.max_norm_drift, 1e-12);
    EXPECT_EQ(r.negative_modes, 32u);
    EXPECT_EQ(r.positive_modes, 32u);
}

TEST(Experiment, WorkerCountDoesNotChangeResults) {
    auto c = small_width_run();
    c.cycles = 1;
    const auto a = run_scenario(c);
    c.workers = 3;
    const auto b = run_scenario(c);
    ASSERT_EQ(a.series.samples.size(), b.series.samples.size());
    for (std::size_t i = 0; i < a.series.samples.size(); ++i) {
        EXPECT_EQ(a.series.samples[i].pairs, b.series.samples[i].pairs);
        EXPECT_EQ(a.series.samples[i].in_well_positrons, b.series.samples[i].in_well_positrons);
    }
}

TEST(Experiment, DensitySnapshotsRecorded) {
    auto c = small_width_run();
    c.record_densities = true;
    c.sample_every = 0;
    const auto r = run_scenario(c);
    ASSERT_EQ(r.densities.size(), 3u);
    EXPECT_TRUE(r.densities[1].field_free);
    EXPECT_NEAR(r.densities[2].electrons.total(), r.series.samples[2].pairs, 1e-8 * r.series.samples[2].pairs);
}

TEST(Experiment, EdgeDensityLooksAtOuterStrip) {
    const auto g = make_grid(100, 1.0);
    DensityProfile d{g, Species::positron, 0.0, std::vector<double>(100, 0.0)};
    d.values[50] = 9.0;
    EXPECT_EQ(edge_density(d, 0.04), 0.0);
    d.values[1] = 2.0;
    d.values[99] = 3.0;
    EXPECT_EQ(edge_density(d, 0.04), 3.0);
    d.values[99] = 0.0;
    EXPECT_EQ(edge_density(d, 0.02), 2.0);
}

TEST(Experiment, BoundaryMonitor) {
    TimeSeries ts;
    for (int i = 0; i < 5; ++i) {
        TimeSample s;
        s.t = i * 1e-3;
        s.edge_positrons = i >= 2 ? 0.1 : 0.0;
        s.edge_electrons = i >= 4 ? 0.1 : 0.0;
        ts.samples.push_back(s);
    }
    const auto b = boundary_monitor(ts, 2.5, 1e-3);
    EXPECT_DOUBLE_EQ(*b.positron, 2e-3);
    EXPECT_DOUBLE_EQ(*b.electron, 4e-3);
    EXPECT_NEAR(b.estimate, 9.12e-3, 1e-5);
    EXPECT_FALSE(boundary_monitor(ts, 2.5, 1.0).positron.has_value());
}

TEST(Experiment, LineFit) {
    std::vector<double> x = {0, 1, 2, 3}, y = {1, 3, 5, 7};
    const auto f = fit_line(x, y);
    EXPECT_NEAR(f.slope, 2.0, 1e-14);
    EXPECT_NEAR(f.intercept, 1.0, 1e-14);
    EXPECT_NEAR(f.relative_residual, 0.0, 1e-14);
    EXPECT_THROW(fit_line(std::vector<double>{1.0}, std::vector<double>{1.0}), ArgumentError);
}

TEST(Experiment, SweepReplacesUpperBound) {
    auto c = small_width_run();
    c.steps_per_cycle = 40;
    const std::vector<double> bounds = {0.0, from_lambda_c(6.0)};
    const auto pts = adiabatic_sweep(c, bounds);
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[0].mode, "width");
    EXPECT_LT(pts[0].final_pairs, 1e-20);
    EXPECT_GT(pts[1].final_pairs, 1e-3);
    EXPECT_DOUBLE_EQ(pts[1].omega, from_c2(0.3));
    const auto par = adiabatic_sweep(c, bounds, true);
    EXPECT_EQ(par[1].final_pairs, pts[1].final_pairs);

    c.drive = StaticWell{};
    EXPECT_THROW(adiabatic_sweep(c, bounds), ArgumentError);
}

TEST(Experiment, Validation) {
    auto c = small_width_run();
    c.n_keep = 65;
    EXPECT_THROW(validate(c), ArgumentError);
    c = small_width_run();
    c.cycles = 0;
    EXPECT_THROW(validate(c), ArgumentError);
    c = small_width_run();
    c.in_well_half_width = 1.0;
    EXPECT_THROW(validate(c), ArgumentError);
    c = small_width_run();
    c.workers = 0;
    EXPECT_THROW(validate(c), ArgumentError);
}
