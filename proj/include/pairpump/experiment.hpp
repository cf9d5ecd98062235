#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pairpump/errors.hpp"
#include "pairpump/free_basis.hpp"
#include "pairpump/grid.hpp"
#include "pairpump/observables.hpp"
#include "pairpump/parallel.hpp"
#include "pairpump/potential.hpp"
#include "pairpump/propagator.hpp"
#include "pairpump/spectrum.hpp"
#include "pairpump/units.hpp"

namespace pairpump {

/// Settings of the `spectrum` subcommand.
struct SpectrumSettings {
    ScanParameter parameter = ScanParameter::width;
    double from = 0.0;  ///< a.u. (length or energy)
    double to = 0.0;
    std::size_t points = 0;
    double window = 1.6 * kRestEnergy;
    std::size_t n_keep = 0; ///< 0 means the full lattice

    bool operator==(const SpectrumSettings&) const = default;
};

/// Settings of the `sweep` subcommand.
struct SweepSettings {
    std::vector<double> upper_bounds; ///< a.u. (W2 or V2)
    bool parallel_points = false;

    bool operator==(const SweepSettings&) const = default;
};

/// Fully resolved description of one simulation. Internal values are a.u.
struct ScenarioConfig {
    std::size_t n_z = 2048;
    double box_length = 2.5;
    DriveMode drive = WidthOscillation{};
    int cycles = 1;
    double duration = 0.0;                         ///< static wells only
    std::optional<double> dt;                      ///< requested step (rounded down to divide a period)
    std::optional<std::size_t> steps_per_cycle;    ///< overrides dt
    std::size_t n_keep = 0;                        ///< evolved negative modes, 0 -> n_z/2
    std::size_t positive_keep = 0;                 ///< projected positive modes, 0 -> n_keep
    std::size_t sample_every = 0;                  ///< extra samples every m steps (0: period boundaries only)
    bool record_densities = false;                 ///< keep density snapshots at samples
    std::size_t density_stride = 1;
    double in_well_half_width = 5.0 * kComptonWavelength;
    double boundary_fraction = 0.02;
    double boundary_threshold = 1e-3;
    int workers = 1;
    std::string output_dir = "out";
    SpectrumSettings spectrum;
    SweepSettings sweep;

    bool operator==(const ScenarioConfig&) const = default;

    std::size_t negative_count() const { return n_keep == 0 ? n_z / 2 : n_keep; }
    std::size_t positive_count() const { return positive_keep == 0 ? negative_count() : positive_keep; }
};

inline void validate(const ScenarioConfig& c) {
    make_grid(c.n_z, c.box_length); // throws on bad grid
    validate(c.drive);
    if (c.cycles < 1) throw ArgumentError("cycle count must be a positive integer");
    if (std::holds_alternative<StaticWell>(c.drive) && !(c.duration >= 0.0))
        throw ArgumentError("static runs need a non-negative duration");
    if (c.negative_count() > c.n_z || c.positive_count() > c.n_z)
        throw ArgumentError("mode truncation exceeds the grid size");
    if (c.dt && !(*c.dt > 0.0)) throw ArgumentError("dt must be positive");
    if (c.steps_per_cycle && *c.steps_per_cycle == 0) throw ArgumentError("steps per cycle must be positive");
    if (c.density_stride == 0) throw ArgumentError("density stride must be positive");
    if (c.workers < 1) throw ArgumentError("worker count must be positive");
    if (!(c.in_well_half_width >= 0.0) || c.in_well_half_width > 0.5 * c.box_length)
        throw ArgumentError("in-well half width must lie in [0, L/2]");
}

/// Largest |V| the drive ever reaches.
inline double max_potential_depth(const DriveMode& drive) {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, StaticWell>) return d.shape.depth;
            else if constexpr (std::is_same_v<T, WidthOscillation>) return d.depth;
            else return d.depth_max;
        },
        drive);
}

/// Default step: (max|V| + spectral bandwidth of the retained modes) dt <= 0.1.
inline double default_time_step(const ScenarioConfig& c) {
    const auto grid = make_grid(c.n_z, c.box_length);
    const auto basis = build_basis(grid, std::max(c.negative_count(), c.positive_count()), Branch::negative);
    double band = kRestEnergy;
    for (const auto& m : basis.modes) band = std::max(band, std::abs(m.energy));
    return 0.1 / (max_potential_depth(c.drive) + band);
}

struct TimeResolution {
    double dt = 0.0;
    std::size_t steps_per_cycle = 0; ///< 0 for static wells
    std::size_t total_steps = 0;
    double t_final = 0.0;
};

inline TimeResolution resolve_time(const ScenarioConfig& c) {
    TimeResolution r;
    const double requested = c.dt ? *c.dt : default_time_step(c);
    if (std::holds_alternative<StaticWell>(c.drive)) {
        r.t_final = c.duration;
        r.total_steps = static_cast<std::size_t>(std::ceil(c.duration / requested - 1e-9));
        r.dt = r.total_steps ? c.duration / static_cast<double>(r.total_steps) : requested;
        return r;
    }
    const double T = period(c.drive);
    r.steps_per_cycle = c.steps_per_cycle ? *c.steps_per_cycle
                                          : static_cast<std::size_t>(std::ceil(T / requested - 1e-9));
    r.steps_per_cycle = std::max<std::size_t>(r.steps_per_cycle, 1);
    r.dt = T / static_cast<double>(r.steps_per_cycle);
    r.total_steps = r.steps_per_cycle * static_cast<std::size_t>(c.cycles);
    r.t_final = T * c.cycles;
    return r;
}

struct TimeSample {
    double t = 0.0;
    std::size_t step = 0;
    double pairs = 0.0;           ///< sum |U_pn|^2
    double electrons = 0.0;       ///< integral of the electron density
    double positrons = 0.0;       ///< integral of the positron density
    double in_well_electrons = 0.0;
    double in_well_positrons = 0.0;
    std::optional<double> alpha_electrons;
    std::optional<double> alpha_positrons;
    bool field_free = false;
    double edge_electrons = 0.0;  ///< max density in the outermost box fraction
    double edge_positrons = 0.0;
};

struct TimeSeries {
    std::vector<TimeSample> samples;

    std::vector<double> times() const {
        std::vector<double> v;
        for (const auto& s : samples) v.push_back(s.t);
        return v;
    }
    std::vector<double> pairs() const {
        std::vector<double> v;
        for (const auto& s : samples) v.push_back(s.pairs);
        return v;
    }
};

struct DensitySnapshot {
    double t = 0.0;
    std::size_t step = 0;
    bool field_free = false;
    DensityProfile electrons;
    DensityProfile positrons;
};

struct ScenarioResult {
    TimeSeries series;
    std::vector<DensitySnapshot> densities;
    TimeResolution time;
    WellWindow window;
    std::size_t negative_modes = 0;
    std::size_t positive_modes = 0;
    double max_norm_drift = 0.0; ///< max over evolved modes of | ||psi||^2 - 1 |
};

struct RunOptions {
    bool observe_densities = true; ///< false: only the pair number is sampled
    std::function<void(std::size_t, std::size_t)> progress;
};

/// Max density over the outermost `fraction` of the box (half on each side).
inline double edge_density(const DensityProfile& d, double fraction) {
    const SpatialGrid& g = *d.grid;
    const double inner = (0.5 - 0.5 * fraction) * g.box_length();
    double m = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
        if (std::abs(g.position(j)) >= inner - 1e-12 * g.box_length()) m = std::max(m, d.values[j]);
    return m;
}

/// Evolve every retained negative-energy mode under the drive and record the
/// pair observables at period boundaries (and every `sample_every` steps).
inline ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& opts = {}) {
    validate(config);
    const auto grid = make_grid(config.n_z, config.box_length);
    const auto negative = build_basis(grid, config.negative_count(), Branch::negative);
    const auto positive = build_basis(grid, config.positive_count(), Branch::positive);
    const int workers = config.workers;

    ScenarioResult res;
    res.time = resolve_time(config);
    res.window = well_window(*grid, config.in_well_half_width);
    res.negative_modes = negative.size();
    res.positive_modes = positive.size();
    const bool free_at_boundaries = vanishes_at_period_boundaries(config.drive);
    const std::size_t spc = res.time.steps_per_cycle;

    std::vector<MomentumSpinor> states;
    states.reserve(negative.size());
    for (std::size_t n = 0; n < negative.size(); ++n) states.push_back(negative.coefficients(n));

    auto is_boundary = [&](std::size_t s) { return spc > 0 && s % spc == 0; };
    auto wants_sample = [&](std::size_t s) {
        return s == 0 || s == res.time.total_steps || is_boundary(s) ||
               (config.sample_every > 0 && s % config.sample_every == 0);
    };

    OverlapMatrix u(positive.size(), negative.size());
    auto observe = [&](std::size_t s) {
        const double t = static_cast<double>(s) * res.time.dt;
        u.t = t;
        parallel_for(states.size(), workers, [&](std::size_t n) { overlap_column(states[n], positive, u.column(n)); });
        TimeSample smp;
        smp.t = t;
        smp.step = s;
        smp.pairs = pair_number(u);
        smp.field_free = free_at_boundaries && (is_boundary(s) || (spc == 0 && s == 0));
        if (opts.observe_densities) {
            auto el = electron_density(u, positive, workers);
            auto po = positron_density(u, negative, workers);
            smp.electrons = el.total();
            smp.positrons = po.total();
            smp.in_well_electrons = in_well_number(el, config.in_well_half_width);
            smp.in_well_positrons = in_well_number(po, config.in_well_half_width);
            smp.alpha_electrons = pump_rate(smp.electrons, std::clamp(smp.in_well_electrons, 0.0, smp.electrons));
            smp.alpha_positrons = pump_rate(smp.positrons, std::clamp(smp.in_well_positrons, 0.0, smp.positrons));
            smp.edge_electrons = edge_density(el, config.boundary_fraction);
            smp.edge_positrons = edge_density(po, config.boundary_fraction);
            if (config.record_densities)
                res.densities.push_back({t, s, smp.field_free, std::move(el), std::move(po)});
        } else {
            smp.electrons = smp.positrons = smp.pairs;
        }
        res.series.samples.push_back(std::move(smp));
    };

    observe(0);
    if (res.time.total_steps > 0) {
        const double dt = res.time.dt;
        const KineticHalfStep kinetic(grid, dt);
        std::vector<double> v(grid->size());
        std::vector<cplx> phases(grid->size());
        for (std::size_t s = 0; s < res.time.total_steps; ++s) {
            // potential shared read-only by all mode workers for this step
            sample_potential_into(config.drive, *grid, (static_cast<double>(s) + 0.5) * dt, v);
            potential_phases_into(v, dt, phases);
            parallel_for(states.size(), workers, [&](std::size_t n) {
                try {
                    strang_step_inplace(states[n], kinetic, phases);
                } catch (const Error& e) {
                    throw NumericalError("mode " + std::to_string(n) + ": " + e.what());
                }
            });
            if (wants_sample(s + 1)) observe(s + 1);
            if (opts.progress) opts.progress(s + 1, res.time.total_steps);
        }
    }
    for (const auto& st : states) res.max_norm_drift = std::max(res.max_norm_drift, std::abs(norm_squared(st) - 1.0));
    for (const auto& smp : res.series.samples)
        if (!std::isfinite(smp.pairs)) throw NumericalError("non-finite pair number at t = " + std::to_string(smp.t));
    return res;
}

struct BoundaryArrival {
    std::optional<double> positron;
    std::optional<double> electron;
    double estimate = 0.0; ///< L / (2c)
};

/// First sample time at which each species' density in the outermost box
/// fraction exceeds `threshold` (particles per a.u. length).
inline BoundaryArrival boundary_monitor(const TimeSeries& series, double box_length, double threshold = 1e-3) {
    BoundaryArrival out;
    out.estimate = box_length / (2.0 * kSpeedOfLight);
    for (const auto& s : series.samples) {
        if (!out.positron && s.edge_positrons > threshold) out.positron = s.t;
        if (!out.electron && s.edge_electrons > threshold) out.electron = s.t;
    }
    return out;
}

/// Least-squares beta of alpha(t) ~ 1 - beta/t over the last half of the
/// field-free samples.
inline std::optional<double> pump_saturation_beta(const TimeSeries& series, Species species) {
    std::vector<double> t, a;
    for (const auto& s : series.samples) {
        if (!s.field_free || s.t <= 0.0) continue;
        const auto& al = species == Species::electron ? s.alpha_electrons : s.alpha_positrons;
        if (!al) continue;
        t.push_back(s.t);
        a.push_back(*al);
    }
    const std::size_t start = t.size() / 2;
    return fit_saturation_beta(std::span(t).subspan(start), std::span(a).subspan(start));
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double relative_residual = 0.0; ///< rms residual / rms |y|
};

inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) throw ArgumentError("fit_line needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    const double dn = static_cast<double>(n);
    const double den = dn * sxx - sx * sx;
    LinearFit f;
    f.slope = den != 0.0 ? (dn * sxy - sx * sy) / den : 0.0;
    f.intercept = (sy - f.slope * sx) / dn;
    double rr = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        rr += r * r;
        yy += y[i] * y[i];
    }
    f.relative_residual = yy > 0.0 ? std::sqrt(rr / yy) : 0.0;
    return f;
}

struct SweepPoint {
    double upper_bound = 0.0; ///< W2 or V2, a.u.
    double final_pairs = 0.0;
    double omega = 0.0;
    std::string mode;
};

/// Replace the upper turning point of an oscillating drive.
inline DriveMode with_upper_bound(const DriveMode& drive, double bound) {
    DriveMode d = drive;
    if (auto* w = std::get_if<WidthOscillation>(&d)) w->width_max = bound;
    else if (auto* v = std::get_if<DepthOscillation>(&d)) v->depth_max = bound;
    else throw ArgumentError("adiabatic sweep needs an oscillating drive");
    return d;
}

/// Final pair number after exactly one drive cycle for each upper turning point.
inline std::vector<SweepPoint> adiabatic_sweep(const ScenarioConfig& base, std::span<const double> upper_bounds,
                                               bool parallel_points = false) {
    if (std::holds_alternative<StaticWell>(base.drive)) throw ArgumentError("adiabatic sweep needs an oscillating drive");
    std::vector<SweepPoint> out(upper_bounds.size());
    auto run_point = [&](std::size_t i, int workers) {
        ScenarioConfig c = base;
        c.drive = with_upper_bound(base.drive, upper_bounds[i]);
        c.cycles = 1;
        c.sample_every = 0;
        c.record_densities = false;
        c.workers = workers;
        RunOptions opts;
        opts.observe_densities = false;
        const auto r = run_scenario(c, opts);
        out[i] = {upper_bounds[i], r.series.samples.back().pairs, angular_frequency(c.drive), drive_name(c.drive)};
    };
    if (parallel_points) {
        parallel_for(upper_bounds.size(), base.workers, [&](std::size_t i) { run_point(i, 1); });
    } else {
        for (std::size_t i = 0; i < upper_bounds.size(); ++i) run_point(i, base.workers);
    }
    return out;
}

} // namespace pairpump
