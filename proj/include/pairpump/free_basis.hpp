#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pairpump/errors.hpp"
#include "pairpump/grid.hpp"
#include "pairpump/units.hpp"

namespace pairpump {

enum class Branch { positive, negative };

inline const char* branch_name(Branch b) { return b == Branch::positive ? "positive" : "negative"; }

/// Field-free plane-wave eigenmode label.
struct FreeMode {
    double k = 0.0;
    std::size_t slot = 0; ///< DFT slot of k on the owning grid
    Branch branch = Branch::positive;
    double energy = 0.0;
};

inline double free_energy(double k, Branch branch) {
    const double e = std::sqrt(kRestEnergy * kRestEnergy + k * k * kRestEnergy);
    return branch == Branch::positive ? e : -e;
}

/// Unit 2-spinor (upper, lower) of the field-free mode. sign(0) is taken as +1.
inline std::pair<double, double> mode_spinor(double k, Branch branch) {
    const double e = std::abs(free_energy(k, branch));
    const double s = k >= 0.0 ? 1.0 : -1.0;
    const double big = std::sqrt(e + kRestEnergy);
    const double small = std::sqrt(std::max(e - kRestEnergy, 0.0));
    const double norm = std::sqrt(2.0 * e);
    if (branch == Branch::positive) return {big / norm, s * small / norm};
    return {-s * small / norm, big / norm};
}

inline FreeMode make_free_mode(const SpatialGrid& grid, double k, Branch branch) {
    const auto slot = grid.slot_of_momentum(k);
    if (!slot) throw ArgumentError("momentum " + std::to_string(k) + " is not on the grid lattice");
    const double kk = grid.momentum(*slot);
    return {kk, *slot, branch, free_energy(kk, branch)};
}

/// Plane-wave coefficients of a mode (a single nonzero slot).
inline MomentumSpinor mode_coefficients(const GridPtr& grid, const FreeMode& mode) {
    MomentumSpinor out(grid);
    const auto [a, b] = mode_spinor(mode.k, mode.branch);
    out.upper[mode.slot] = a;
    out.lower[mode.slot] = b;
    return out;
}

inline SpinorField mode_field(const GridPtr& grid, const FreeMode& mode) {
    SpinorField out(grid);
    const auto [a, b] = mode_spinor(mode.k, mode.branch);
    const double amp = 1.0 / std::sqrt(grid->box_length());
    for (std::size_t j = 0; j < grid->size(); ++j) {
        const cplx wave = std::polar(amp, mode.k * grid->position(j));
        out.upper[j] = a * wave;
        out.lower[j] = b * wave;
    }
    const double n = std::sqrt(norm_squared(out));
    out *= cplx{1.0 / n, 0.0};
    return out;
}

/// Normalized field-free eigenmode exp(ikz) chi(k) on the grid. k must lie on
/// the momentum lattice.
inline SpinorField make_mode(const GridPtr& grid, double k, Branch branch) {
    return mode_field(grid, make_free_mode(*grid, k, branch));
}

/// Truncated set of modes on one energy branch, ordered by ascending |k| with
/// k > 0 ahead of -k.
struct BasisSet {
    GridPtr grid;
    Branch branch = Branch::positive;
    std::vector<FreeMode> modes;

    std::size_t size() const noexcept { return modes.size(); }
    SpinorField field(std::size_t i) const { return mode_field(grid, modes.at(i)); }
    MomentumSpinor coefficients(std::size_t i) const { return mode_coefficients(grid, modes.at(i)); }

    std::vector<SpinorField> fields() const {
        std::vector<SpinorField> out;
        out.reserve(modes.size());
        for (const auto& m : modes) out.push_back(mode_field(grid, m));
        return out;
    }
};

/// DFT slots ordered by ascending |k|, positive momentum first on ties.
inline std::vector<std::size_t> slots_by_momentum_rank(const SpatialGrid& grid) {
    std::vector<std::size_t> slots(grid.size());
    for (std::size_t m = 0; m < slots.size(); ++m) slots[m] = m;
    std::stable_sort(slots.begin(), slots.end(), [&](std::size_t a, std::size_t b) {
        const long sa = grid.signed_index(a);
        const long sb = grid.signed_index(b);
        if (std::labs(sa) != std::labs(sb)) return std::labs(sa) < std::labs(sb);
        return sa > sb;
    });
    return slots;
}

inline BasisSet build_basis(const GridPtr& grid, std::size_t n_keep, Branch branch) {
    if (n_keep > grid->size())
        throw ArgumentError("basis size " + std::to_string(n_keep) + " exceeds grid size " +
                            std::to_string(grid->size()));
    BasisSet out{grid, branch, {}};
    out.modes.reserve(n_keep);
    const auto slots = slots_by_momentum_rank(*grid);
    for (std::size_t i = 0; i < n_keep; ++i) {
        const double k = grid->momentum(slots[i]);
        out.modes.push_back({k, slots[i], branch, free_energy(k, branch)});
    }
    return out;
}

} // namespace pairpump
