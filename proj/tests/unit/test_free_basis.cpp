#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "pairpump/free_basis.hpp"

using namespace pairpump;

namespace {
Eigen::Matrix2d free_h(double k) {
    Eigen::Matrix2d h;
    h << kRestEnergy, kSpeedOfLight * k, kSpeedOfLight * k, -kRestEnergy;
    return h;
}
} // namespace

TEST(FreeBasis, SpinorsAreNormalizedEigenvectors) {
    for (double k : {-900.0, -3.0, 0.0, 1e-3, 250.0, 4000.0}) {
        for (auto b : {Branch::positive, Branch::negative}) {
            const auto [u, l] = mode_spinor(k, b);
            EXPECT_NEAR(u * u + l * l, 1.0, 1e-14);
            const Eigen::Vector2d chi(u, l);
            const Eigen::Vector2d r = free_h(k) * chi - free_energy(k, b) * chi;
            EXPECT_LT(r.norm(), 1e-10 * kRestEnergy) << "k=" << k;
        }
        const auto p = mode_spinor(k, Branch::positive);
        const auto n = mode_spinor(k, Branch::negative);
        EXPECT_NEAR(p.first * n.first + p.second * n.second, 0.0, 1e-14);
    }
}

TEST(FreeBasis, ZeroMomentumConvention) {
    EXPECT_EQ(mode_spinor(0.0, Branch::positive), (std::pair<double, double>{1.0, 0.0}));
    EXPECT_EQ(mode_spinor(0.0, Branch::negative), (std::pair<double, double>{-0.0, 1.0}));
    EXPECT_DOUBLE_EQ(free_energy(0.0, Branch::negative), -kRestEnergy);
}

TEST(FreeBasis, ModesAreOrthonormalOnTheGrid) {
    const auto g = make_grid(32, 2.5);
    const auto pos = build_basis(g, 32, Branch::positive).fields();
    const auto neg = build_basis(g, 32, Branch::negative).fields();
    for (std::size_t a = 0; a < 32; a += 3) {
        for (std::size_t b = 0; b < 32; b += 5) {
            const double delta = a == b ? 1.0 : 0.0;
            EXPECT_NEAR(std::abs(inner_product(pos[a], pos[b]) - delta), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(inner_product(neg[a], neg[b]) - delta), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(inner_product(pos[a], neg[b])), 0.0, 1e-12);
        }
    }
}

TEST(FreeBasis, OrderingByMomentumRank) {
    const auto g = make_grid(8, 1.0);
    const auto b = build_basis(g, 8, Branch::negative);
    const std::vector<long> expect = {0, 1, -1, 2, -2, 3, -3, -4};
    ASSERT_EQ(b.size(), 8u);
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_EQ(g->signed_index(b.modes[i].slot), expect[i]);
        EXPECT_LT(b.modes[i].energy, 0.0);
    }
    EXPECT_EQ(build_basis(g, 3, Branch::positive).size(), 3u);
    EXPECT_THROW(build_basis(g, 9, Branch::positive), ArgumentError);
}

TEST(FreeBasis, CoefficientsMatchField) {
    const auto g = make_grid(16, 2.0);
    const auto mode = make_free_mode(*g, g->momentum(3), Branch::negative);
    const auto from_field = to_momentum(mode_field(g, mode));
    const auto direct = mode_coefficients(g, mode);
    for (std::size_t s = 0; s < 16; ++s) {
        EXPECT_NEAR(std::abs(from_field.upper[s] - direct.upper[s]), 0.0, 1e-13);
        EXPECT_NEAR(std::abs(from_field.lower[s] - direct.lower[s]), 0.0, 1e-13);
    }
    EXPECT_THROW(make_mode(g, 0.3, Branch::positive), ArgumentError);
}
