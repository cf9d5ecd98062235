#include <gtest/gtest.h>

#include "pairpump/potential.hpp"

using namespace pairpump;

namespace {
WidthOscillation width_drive(double w2 = from_lambda_c(10.0), double omega = from_c2(0.3)) {
    return {from_c2(2.53), 0.0, w2, omega, 0.3 * kComptonWavelength};
}
DepthOscillation depth_drive(double v2 = from_c2(2.53), double omega = from_c2(0.3)) {
    return {from_lambda_c(10.0), 0.0, v2, omega, 0.3 * kComptonWavelength};
}
} // namespace

TEST(Potential, WidthEnvelopeTurningPoints) {
    const auto d = width_drive();
    const double T = period(DriveMode{d});
    EXPECT_DOUBLE_EQ(width_at(d, 0.0), 0.0);
    EXPECT_NEAR(width_at(d, 0.5 * T), d.width_max, 1e-12 * d.width_max);
    EXPECT_NEAR(width_at(d, T), 0.0, 1e-12 * d.width_max);
    // zero slope at t = 0
    const double h = 1e-6 * T;
    EXPECT_NEAR((width_at(d, h) - width_at(d, 0.0)) / h, 0.0, 1e-4 * d.width_max / T);
}

TEST(Potential, EnvelopeMatchesShiftedSine) {
    const double omega = 3.7;
    for (double t : {0.0, 0.1, 0.9, 2.3, 10.0})
        EXPECT_NEAR(drive_envelope(omega, t), 0.5 * (1.0 + std::sin(omega * t - 0.5 * kPi)), 1e-14);
}

TEST(Potential, PeriodOfQuotedFrequency) {
    EXPECT_NEAR(period(DriveMode{width_drive()}), 1.115e-3, 1e-6);
    EXPECT_NEAR(angular_frequency(DriveMode{depth_drive()}), 0.3 * kRestEnergy, 1e-9);
}

TEST(Potential, DepthEnvelope) {
    const auto d = depth_drive();
    const double T = period(DriveMode{d});
    EXPECT_DOUBLE_EQ(depth_at(d, 0.0), 0.0);
    EXPECT_NEAR(to_c2(depth_at(d, 0.5 * T)), 2.53, 1e-12);
    EXPECT_NEAR(depth_at(d, T), 0.0, 1e-9);
}

TEST(Potential, WellProfile) {
    const WellShape s{from_c2(2.53), from_lambda_c(10.0), 0.3 * kComptonWavelength};
    EXPECT_NEAR(well_profile(s, 0.0), -s.depth, 1e-10 * s.depth);
    EXPECT_NEAR(well_profile(s, 0.5 * s.width), -0.5 * s.depth, 1e-10 * s.depth);
    EXPECT_NEAR(well_profile(s, 1.0), 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(well_profile(s, 0.013), well_profile(s, -0.013));
    EXPECT_DOUBLE_EQ(well_profile(WellShape{s.depth, 0.0, s.edge}, 0.0), 0.0);
}

TEST(Potential, TimePeriodicSampling) {
    const auto g = make_grid(256, 2.5);
    for (const DriveMode d : {DriveMode{width_drive()}, DriveMode{depth_drive()}}) {
        const double T = period(d);
        for (double t : {0.1 * T, 0.37 * T, 0.8 * T}) {
            const auto a = sample_potential(d, *g, t);
            const auto b = sample_potential(d, *g, t + T);
            for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-9 * kRestEnergy);
        }
        for (double v : sample_potential(d, *g, 0.0)) EXPECT_EQ(v, 0.0);
        EXPECT_TRUE(vanishes_at_period_boundaries(d));
    }
}

TEST(Potential, WiderUpperBoundNeverRaisesPotential) {
    const auto g = make_grid(512, 2.5);
    for (double t : {0.05e-3, 0.3e-3, 0.55e-3}) {
        const auto lo = sample_potential(DriveMode{width_drive(from_lambda_c(5.0))}, *g, t);
        const auto hi = sample_potential(DriveMode{width_drive(from_lambda_c(9.0))}, *g, t);
        for (std::size_t j = 0; j < lo.size(); ++j) EXPECT_LE(hi[j], lo[j] + 1e-12);
    }
}

TEST(Potential, Validation) {
    EXPECT_THROW(validate(DriveMode{WidthOscillation{1.0, 2.0, 1.0, 1.0, 0.1}}), ArgumentError);
    EXPECT_THROW(validate(DriveMode{WidthOscillation{1.0, 0.0, 1.0, 0.0, 0.1}}), ArgumentError);
    EXPECT_THROW(validate(DriveMode{DepthOscillation{1.0, 0.0, -1.0, 1.0, 0.1}}), ArgumentError);
    EXPECT_THROW(validate(DriveMode{StaticWell{WellShape{1.0, 1.0, 0.0}}}), ArgumentError);
    EXPECT_NO_THROW(validate(DriveMode{width_drive()}));
}

TEST(Potential, Names) {
    EXPECT_EQ(drive_name(DriveMode{StaticWell{}}), "static");
    EXPECT_EQ(drive_name(DriveMode{width_drive()}), "width");
    EXPECT_EQ(drive_name(DriveMode{depth_drive()}), "depth");
}
