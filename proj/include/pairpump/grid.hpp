#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pairpump/errors.hpp"
#include "pairpump/fourier.hpp"
#include "pairpump/units.hpp"

namespace pairpump {

using cplx = std::complex<double>;

/// Uniform periodic grid z_j = -L/2 + j dz on [-L/2, L/2) together with the
/// conjugate DFT lattice k_m = 2 pi m~ / L, m~ the signed index in [-n/2, n/2).
/// Momenta are stored in DFT index order (0, 1, ..., n/2-1, -n/2, ..., -1).
class SpatialGrid {
public:
    SpatialGrid(std::size_t n_z, double box_length) : n_(n_z), length_(box_length) {
        if (n_z < 4 || n_z % 2 != 0)
            throw ArgumentError("grid point count must be even and >= 4, got " + std::to_string(n_z));
        if (!(box_length > 0.0) || !std::isfinite(box_length))
            throw ArgumentError("box length must be positive");
        dz_ = length_ / static_cast<double>(n_);
        positions_.resize(n_);
        momenta_.resize(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            positions_[j] = -0.5 * length_ + static_cast<double>(j) * dz_;
            momenta_[j] = 2.0 * kPi * static_cast<double>(signed_index(j)) / length_;
        }
        fft_ = std::make_shared<FourierTransform>(n_);
    }

    std::size_t size() const noexcept { return n_; }
    double box_length() const noexcept { return length_; }
    double dz() const noexcept { return dz_; }
    double position(std::size_t j) const { return positions_[j]; }
    double momentum(std::size_t m) const { return momenta_[m]; }
    std::span<const double> positions() const noexcept { return positions_; }
    std::span<const double> momenta() const noexcept { return momenta_; }
    double max_momentum() const noexcept { return kPi * static_cast<double>(n_) / length_; }

    /// Signed lattice index of DFT slot m.
    long signed_index(std::size_t m) const noexcept {
        const auto half = static_cast<long>(n_ / 2);
        const auto mi = static_cast<long>(m);
        return mi < half ? mi : mi - static_cast<long>(n_);
    }

    /// DFT slot holding signed lattice index s, if s is in [-n/2, n/2).
    std::optional<std::size_t> slot_of_index(long s) const noexcept {
        const auto half = static_cast<long>(n_ / 2);
        if (s < -half || s >= half) return std::nullopt;
        return static_cast<std::size_t>(s >= 0 ? s : s + static_cast<long>(n_));
    }

    /// DFT slot of momentum k, or nullopt when k is not on the lattice.
    std::optional<std::size_t> slot_of_momentum(double k) const noexcept {
        const double x = k * length_ / (2.0 * kPi);
        const double r = std::round(x);
        if (std::abs(x - r) > 1e-9 * std::max(1.0, std::abs(x))) return std::nullopt;
        return slot_of_index(static_cast<long>(r));
    }

    const FourierTransform& fft() const noexcept { return *fft_; }

    bool same_as(const SpatialGrid& o) const noexcept {
        return this == &o || (n_ == o.n_ && length_ == o.length_);
    }

private:
    std::size_t n_;
    double length_;
    double dz_;
    std::vector<double> positions_;
    std::vector<double> momenta_;
    std::shared_ptr<const FourierTransform> fft_;
};

using GridPtr = std::shared_ptr<const SpatialGrid>;

inline GridPtr make_grid(std::size_t n_z, double box_length) {
    return std::make_shared<const SpatialGrid>(n_z, box_length);
}

namespace detail {
template <class A, class B>
void require_same_grid(const A& a, const B& b, const char* where) {
    if (!a.grid || !b.grid || !a.grid->same_as(*b.grid))
        throw ArgumentError(std::string(where) + ": grid mismatch");
}
} // namespace detail

/// Two-component field sampled at the grid positions.
struct SpinorField {
    GridPtr grid;
    ComplexBuffer upper;
    ComplexBuffer lower;

    SpinorField() = default;
    explicit SpinorField(GridPtr g)
        : grid(std::move(g)), upper(grid->size()), lower(grid->size()) {}

    std::size_t size() const noexcept { return upper.size(); }

    SpinorField& operator*=(cplx s) {
        for (auto& x : upper) x *= s;
        for (auto& x : lower) x *= s;
        return *this;
    }
};

/// Two-component field in the plane-wave representation:
///   psi(z_j) = sum_m coeff_m exp(i k_m z_j) / sqrt(L).
/// With this scaling the position-space norm equals sum_m |coeff_m|^2.
struct MomentumSpinor {
    GridPtr grid;
    ComplexBuffer upper;
    ComplexBuffer lower;

    MomentumSpinor() = default;
    explicit MomentumSpinor(GridPtr g)
        : grid(std::move(g)), upper(grid->size()), lower(grid->size()) {}

    std::size_t size() const noexcept { return upper.size(); }
};

/// dz * sum_j (conj(a_up) b_up + conj(a_lo) b_lo).
inline cplx inner_product(const SpinorField& a, const SpinorField& b) {
    detail::require_same_grid(a, b, "inner_product");
    cplx s{0.0, 0.0};
    for (std::size_t j = 0; j < a.size(); ++j)
        s += std::conj(a.upper[j]) * b.upper[j] + std::conj(a.lower[j]) * b.lower[j];
    return s * a.grid->dz();
}

inline double norm_squared(const SpinorField& a) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += std::norm(a.upper[j]) + std::norm(a.lower[j]);
    return s * a.grid->dz();
}

inline double norm_squared(const MomentumSpinor& a) {
    double s = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) s += std::norm(a.upper[m]) + std::norm(a.lower[m]);
    return s;
}

inline cplx inner_product(const MomentumSpinor& a, const MomentumSpinor& b) {
    detail::require_same_grid(a, b, "inner_product");
    cplx s{0.0, 0.0};
    for (std::size_t m = 0; m < a.size(); ++m)
        s += std::conj(a.upper[m]) * b.upper[m] + std::conj(a.lower[m]) * b.lower[m];
    return s;
}

// exp(-i k_m z_0) with z_0 = -L/2 reduces to (-1)^m for even n.
namespace detail {
inline double origin_sign(std::size_t m) { return (m % 2 == 0) ? 1.0 : -1.0; }

inline void position_to_momentum_inplace(const SpatialGrid& g, std::span<cplx> data) {
    g.fft().forward(data);
    const double scale = std::sqrt(g.box_length()) / static_cast<double>(g.size());
    for (std::size_t m = 0; m < data.size(); ++m) data[m] *= origin_sign(m) * scale;
}

inline void momentum_to_position_inplace(const SpatialGrid& g, std::span<cplx> data) {
    for (std::size_t m = 0; m < data.size(); ++m) data[m] *= origin_sign(m);
    g.fft().backward(data);
    const double scale = 1.0 / std::sqrt(g.box_length());
    for (auto& x : data) x *= scale;
}
} // namespace detail

inline MomentumSpinor to_momentum(const SpinorField& f) {
    MomentumSpinor out(f.grid);
    out.upper = f.upper;
    out.lower = f.lower;
    detail::position_to_momentum_inplace(*f.grid, out.upper);
    detail::position_to_momentum_inplace(*f.grid, out.lower);
    return out;
}

inline SpinorField to_position(const MomentumSpinor& f) {
    SpinorField out(f.grid);
    out.upper = f.upper;
    out.lower = f.lower;
    detail::momentum_to_position_inplace(*f.grid, out.upper);
    detail::momentum_to_position_inplace(*f.grid, out.lower);
    return out;
}

} // namespace pairpump
