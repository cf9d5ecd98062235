#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pairpump/errors.hpp"
#include "pairpump/free_basis.hpp"
#include "pairpump/grid.hpp"
#include "pairpump/parallel.hpp"
#include "pairpump/units.hpp"

namespace pairpump {

/// U[p][n] = <W_p | evolved_n>; rows follow the positive basis order, columns
/// the evolved negative-mode order. Stored column-major.
struct OverlapMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<cplx> data;
    double t = 0.0;

    OverlapMatrix() = default;
    OverlapMatrix(std::size_t r, std::size_t c, double time = 0.0) : rows(r), cols(c), data(r * c), t(time) {}

    cplx& operator()(std::size_t p, std::size_t n) { return data[n * rows + p]; }
    cplx operator()(std::size_t p, std::size_t n) const { return data[n * rows + p]; }
    std::span<cplx> column(std::size_t n) { return {data.data() + n * rows, rows}; }
    std::span<const cplx> column(std::size_t n) const { return {data.data() + n * rows, rows}; }
};

enum class Species { electron, positron };

inline const char* species_name(Species s) { return s == Species::electron ? "electron" : "positron"; }

/// Particle density per unit length on the grid.
struct DensityProfile {
    GridPtr grid;
    Species species = Species::electron;
    double t = 0.0;
    std::vector<double> values;

    double total() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * grid->dz();
    }
};

/// Column of U for one evolved state given in plane-wave form:
/// <W_p|psi> = chi_p . coeff(k_p), since the mode spinors are real.
inline void overlap_column(const MomentumSpinor& state, const BasisSet& positive, std::span<cplx> out) {
    if (out.size() != positive.size()) throw ArgumentError("overlap_column: output length mismatch");
    for (std::size_t p = 0; p < positive.size(); ++p) {
        const auto& mode = positive.modes[p];
        const auto [a, b] = mode_spinor(mode.k, mode.branch);
        out[p] = a * state.upper[mode.slot] + b * state.lower[mode.slot];
    }
}

inline OverlapMatrix overlap_matrix(std::span<const SpinorField> evolved, const BasisSet& positive, double t = 0.0) {
    OverlapMatrix u(positive.size(), evolved.size(), t);
    for (std::size_t n = 0; n < evolved.size(); ++n) {
        detail::require_same_grid(evolved[n], positive, "overlap_matrix");
        overlap_column(to_momentum(evolved[n]), positive, u.column(n));
    }
    return u;
}

inline double pair_number(const OverlapMatrix& u) {
    double s = 0.0;
    for (const auto& x : u.data) s += std::norm(x);
    return s;
}

namespace detail {

// Columns are reduced in fixed-size blocks so the summation order, and hence
// the rounding, does not depend on the worker count.
inline constexpr std::size_t kReductionBlock = 8;

/// sum_i |sum_j coeff(i, j) W_j(z)|^2 where W_j runs over `basis`.
template <class Coeff>
std::vector<double> coherent_density(const BasisSet& basis, std::size_t outer, Coeff coeff, int workers) {
    const SpatialGrid& g = *basis.grid;
    const std::size_t n = g.size();
    const std::size_t blocks = (outer + kReductionBlock - 1) / kReductionBlock;
    std::vector<std::vector<double>> partial(blocks, std::vector<double>(n, 0.0));
    std::vector<std::pair<double, double>> spinors;
    spinors.reserve(basis.size());
    for (const auto& m : basis.modes) spinors.push_back(mode_spinor(m.k, m.branch));

    parallel_for(blocks, workers, [&](std::size_t blk) {
        ComplexBuffer up(n), lo(n);
        auto& acc = partial[blk];
        const std::size_t end = std::min(outer, (blk + 1) * kReductionBlock);
        for (std::size_t i = blk * kReductionBlock; i < end; ++i) {
            std::fill(up.begin(), up.end(), cplx{});
            std::fill(lo.begin(), lo.end(), cplx{});
            for (std::size_t j = 0; j < basis.size(); ++j) {
                const cplx w = coeff(i, j);
                const std::size_t slot = basis.modes[j].slot;
                up[slot] += w * spinors[j].first;
                lo[slot] += w * spinors[j].second;
            }
            momentum_to_position_inplace(g, up);
            momentum_to_position_inplace(g, lo);
            for (std::size_t z = 0; z < n; ++z) acc[z] += std::norm(up[z]) + std::norm(lo[z]);
        }
    });

    std::vector<double> out(n, 0.0);
    for (const auto& blk : partial)
        for (std::size_t z = 0; z < n; ++z) out[z] += blk[z];
    return out;
}

} // namespace detail

/// N_el(z) = sum_n |sum_p U_pn W_p(z)|^2.
inline DensityProfile electron_density(const OverlapMatrix& u, const BasisSet& positive, int workers = 1) {
    if (u.rows != positive.size()) throw ArgumentError("electron_density: U rows do not match the positive basis");
    DensityProfile d{positive.grid, Species::electron, u.t, {}};
    d.values = detail::coherent_density(
        positive, u.cols, [&](std::size_t n, std::size_t p) { return u(p, n); }, workers);
    return d;
}

/// N_po(z) = sum_p |sum_n U_pn W_n(z)|^2.
inline DensityProfile positron_density(const OverlapMatrix& u, const BasisSet& negative, int workers = 1) {
    if (u.cols != negative.size()) throw ArgumentError("positron_density: U columns do not match the negative basis");
    DensityProfile d{negative.grid, Species::positron, u.t, {}};
    d.values = detail::coherent_density(
        negative, u.rows, [&](std::size_t p, std::size_t n) { return u(p, n); }, workers);
    return d;
}

/// Grid window |z_j| <= half_width used for in-well integrals.
struct WellWindow {
    std::size_t first = 0; ///< first included index
    std::size_t last = 0;  ///< last included index
    double z_min = 0.0;
    double z_max = 0.0;
};

inline WellWindow well_window(const SpatialGrid& g, double half_width) {
    if (!(half_width >= 0.0) || half_width > 0.5 * g.box_length())
        throw ArgumentError("in-well half width must lie in [0, L/2]");
    const double tol = 1e-9 * g.dz();
    WellWindow w{g.size(), 0, 0.0, 0.0};
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (std::abs(g.position(j)) <= half_width + tol) {
            w.first = std::min(w.first, j);
            w.last = std::max(w.last, j);
        }
    }
    if (w.first > w.last) return {1, 0, 0.0, 0.0}; // empty
    w.z_min = g.position(w.first);
    w.z_max = g.position(w.last);
    return w;
}

inline double in_well_number(const DensityProfile& profile, double half_width = 5.0 * kComptonWavelength) {
    const WellWindow w = well_window(*profile.grid, half_width);
    double s = 0.0;
    for (std::size_t j = w.first; j <= w.last && j < profile.values.size(); ++j) s += profile.values[j];
    return s * profile.grid->dz();
}

/// Totals at or below this are treated as "no pairs yet".
inline constexpr double kNoPairsThreshold = 1e-12;

/// alpha = (total - in_well) / total, or nullopt when no pairs exist yet.
inline std::optional<double> pump_rate(double total, double in_well) {
    if (in_well < -1e-9 || in_well > total + 1e-9)
        throw ArgumentError("pump_rate: in-well count must lie in [0, total]");
    if (total <= kNoPairsThreshold) return std::nullopt;
    return (total - in_well) / total;
}

/// Least-squares beta in alpha(t) ~ 1 - beta / t.
inline std::optional<double> fit_saturation_beta(std::span<const double> times, std::span<const double> alphas) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < times.size() && i < alphas.size(); ++i) {
        if (!(times[i] > 0.0) || !std::isfinite(alphas[i])) continue;
        const double inv = 1.0 / times[i];
        num += (1.0 - alphas[i]) * inv;
        den += inv * inv;
    }
    if (den == 0.0) return std::nullopt;
    return num / den;
}

} // namespace pairpump
