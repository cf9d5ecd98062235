#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "pairpump/errors.hpp"
#include "pairpump/grid.hpp"
#include "pairpump/potential.hpp"
#include "pairpump/units.hpp"

namespace pairpump {

/// Uniform time stepping t_start, t_start + dt, ..., t_start + steps*dt.
struct StepSchedule {
    double t_start = 0.0;
    double dt = 0.0;
    std::size_t steps = 0;
    std::vector<std::size_t> snapshot_steps; ///< sorted step indices in [0, steps]

    double t_final() const { return t_start + static_cast<double>(steps) * dt; }
    double time_at(std::size_t step) const { return t_start + static_cast<double>(step) * dt; }
    std::vector<double> snapshot_times() const {
        std::vector<double> out;
        for (auto s : snapshot_steps) out.push_back(time_at(s));
        return out;
    }
};

/// Build a schedule; t_final - t_start must be an integer multiple of dt
/// (within 1e-9 relative) and each snapshot time must sit on a step boundary.
inline StepSchedule make_schedule(double t_final, double dt, std::vector<double> snapshot_times = {},
                                  double t_start = 0.0) {
    const double span = t_final - t_start;
    if (span == 0.0) {
        StepSchedule s{t_start, dt, 0, {}};
        for (double t : snapshot_times) {
            if (t != t_start) throw ArgumentError("snapshot time outside an empty schedule");
            s.snapshot_steps.push_back(0);
        }
        return s;
    }
    if (dt == 0.0 || span / dt < 0.0) throw ArgumentError("time step has the wrong sign or is zero");
    const double ratio = span / dt;
    const double steps = std::round(ratio);
    if (std::abs(ratio - steps) > 1e-9 * std::max(1.0, steps))
        throw ArgumentError("total time is not an integer number of steps");
    StepSchedule s{t_start, dt, static_cast<std::size_t>(steps), {}};
    std::sort(snapshot_times.begin(), snapshot_times.end(),
              [&](double a, double b) { return (a - t_start) / dt < (b - t_start) / dt; });
    for (double t : snapshot_times) {
        const double r = (t - t_start) / dt;
        const double ri = std::round(r);
        if (std::abs(r - ri) > 1e-9 * std::max(1.0, ri) || ri < 0.0 || ri > steps)
            throw ArgumentError("snapshot time is not on a step boundary");
        s.snapshot_steps.push_back(static_cast<std::size_t>(ri));
    }
    return s;
}

/// Precomputed kinetic half-step propagator exp(-i dt/2 H_free) on a grid.
/// For each lattice momentum this is the 2x2 unitary
///   cos(phi) I - i sin(phi) (sigma_1 k + c sigma_3) / sqrt(c^2 + k^2),
///   phi = (c dt / 2) sqrt(c^2 + k^2).
class KineticHalfStep {
public:
    KineticHalfStep(GridPtr grid, double dt) : grid_(std::move(grid)), dt_(dt) {
        const std::size_t n = grid_->size();
        cos_.resize(n);
        mass_.resize(n);
        momentum_.resize(n);
        const double c = kSpeedOfLight;
        for (std::size_t m = 0; m < n; ++m) {
            const double k = grid_->momentum(m);
            const double r = std::sqrt(c * c + k * k);
            const double phi = 0.5 * c * dt * r;
            const double sn = std::sin(phi);
            cos_[m] = std::cos(phi);
            mass_[m] = sn * c / r;
            momentum_[m] = sn * k / r;
        }
    }

    double dt() const noexcept { return dt_; }
    const GridPtr& grid() const noexcept { return grid_; }

    // upper' = (cos - i a) u - i b l,  lower' = -i b u + (cos + i a) l,
    // a = sin(phi) c / r, b = sin(phi) k / r; written out in real arithmetic.
    void apply(std::span<cplx> upper, std::span<cplx> lower) const {
        for (std::size_t m = 0; m < upper.size(); ++m) {
            const double ur = upper[m].real(), ui = upper[m].imag();
            const double lr = lower[m].real(), li = lower[m].imag();
            const double cs = cos_[m], a = mass_[m], b = momentum_[m];
            upper[m] = {cs * ur + a * ui + b * li, cs * ui - a * ur - b * lr};
            lower[m] = {cs * lr - a * li + b * ui, cs * li + a * lr - b * ur};
        }
    }

    void apply(MomentumSpinor& f) const { apply(f.upper, f.lower); }

private:
    GridPtr grid_;
    double dt_;
    std::vector<double> cos_;
    std::vector<double> mass_;
    std::vector<double> momentum_;
};

/// Pointwise phases exp(-i V_j dt).
inline std::vector<cplx> potential_phases(std::span<const double> v, double dt) {
    std::vector<cplx> out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) out[j] = std::polar(1.0, -v[j] * dt);
    return out;
}

inline void potential_phases_into(std::span<const double> v, double dt, std::span<cplx> out) {
    for (std::size_t j = 0; j < v.size(); ++j) out[j] = std::polar(1.0, -v[j] * dt);
}

/// One Strang step K(dt/2) V(dt) K(dt/2) on a plane-wave state, in place.
/// `phases` are the potential phases for this step, sampled on the grid.
inline void strang_step_inplace(MomentumSpinor& state, const KineticHalfStep& kinetic,
                                std::span<const cplx> phases) {
    const SpatialGrid& g = *state.grid;
    kinetic.apply(state);
    detail::momentum_to_position_inplace(g, state.upper);
    detail::momentum_to_position_inplace(g, state.lower);
    auto rotate = [](cplx& x, cplx p) {
        x = {x.real() * p.real() - x.imag() * p.imag(), x.real() * p.imag() + x.imag() * p.real()};
    };
    for (std::size_t j = 0; j < phases.size(); ++j) {
        rotate(state.upper[j], phases[j]);
        rotate(state.lower[j], phases[j]);
    }
    detail::position_to_momentum_inplace(g, state.upper);
    detail::position_to_momentum_inplace(g, state.lower);
    kinetic.apply(state);
}

inline SpinorField kinetic_half_step(const SpinorField& field, double dt) {
    MomentumSpinor m = to_momentum(field);
    KineticHalfStep(field.grid, dt).apply(m);
    return to_position(m);
}

inline SpinorField potential_step(const SpinorField& field, std::span<const double> v, double dt) {
    if (v.size() != field.size()) throw ArgumentError("potential_step: potential length mismatch");
    SpinorField out = field;
    for (std::size_t j = 0; j < v.size(); ++j) {
        const cplx p = std::polar(1.0, -v[j] * dt);
        out.upper[j] *= p;
        out.lower[j] *= p;
    }
    return out;
}

/// The potential is sampled at the step midpoint t + dt/2.
inline SpinorField strang_step(const SpinorField& field, const DriveMode& drive, double t, double dt) {
    const auto v = sample_potential(drive, *field.grid, t + 0.5 * dt);
    SpinorField out = kinetic_half_step(field, dt);
    out = potential_step(out, v, dt);
    return kinetic_half_step(out, dt);
}

struct EvolveResult {
    SpinorField final_state;
    std::vector<std::pair<double, SpinorField>> snapshots;
};

inline EvolveResult evolve(const SpinorField& initial, const DriveMode& drive, const StepSchedule& schedule) {
    EvolveResult result;
    const GridPtr& grid = initial.grid;
    MomentumSpinor state = to_momentum(initial);
    std::size_t next_snap = 0;
    auto capture = [&](std::size_t step) {
        while (next_snap < schedule.snapshot_steps.size() && schedule.snapshot_steps[next_snap] == step) {
            result.snapshots.emplace_back(schedule.time_at(step), to_position(state));
            ++next_snap;
        }
    };
    capture(0);
    if (schedule.steps > 0) {
        const KineticHalfStep kinetic(grid, schedule.dt);
        std::vector<double> v(grid->size());
        std::vector<cplx> phases(grid->size());
        for (std::size_t s = 0; s < schedule.steps; ++s) {
            sample_potential_into(drive, *grid, schedule.time_at(s) + 0.5 * schedule.dt, v);
            potential_phases_into(v, schedule.dt, phases);
            strang_step_inplace(state, kinetic, phases);
            capture(s + 1);
        }
        result.final_state = to_position(state);
    } else {
        result.final_state = initial;
    }
    return result;
}

} // namespace pairpump
