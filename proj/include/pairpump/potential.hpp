#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "pairpump/errors.hpp"
#include "pairpump/grid.hpp"
#include "pairpump/units.hpp"

namespace pairpump {

/// Smooth-edged well of depth V0 (stored as a positive magnitude), width W and
/// edge width D:  V(z) = V0/2 [tanh((z - W/2)/D) - tanh((z + W/2)/D)] <= 0.
struct WellShape {
    double depth = 0.0;
    double width = 0.0;
    double edge = 0.3 * kComptonWavelength;

    bool operator==(const WellShape&) const = default;
};

/// Time-independent well.
struct StaticWell {
    WellShape shape;

    bool operator==(const StaticWell&) const = default;
};

/// Depth fixed, width swings W1 -> W2 -> W1 once per period.
struct WidthOscillation {
    double depth = 0.0;
    double width_min = 0.0;
    double width_max = 0.0;
    double omega = 1.0;
    double edge = 0.3 * kComptonWavelength;

    bool operator==(const WidthOscillation&) const = default;
};

/// Width fixed, depth swings V1 -> V2 -> V1 once per period.
struct DepthOscillation {
    double width = 0.0;
    double depth_min = 0.0;
    double depth_max = 0.0;
    double omega = 1.0;
    double edge = 0.3 * kComptonWavelength;

    bool operator==(const DepthOscillation&) const = default;
};

using DriveMode = std::variant<StaticWell, WidthOscillation, DepthOscillation>;

inline void validate(const WellShape& s) {
    if (!(s.edge > 0.0)) throw ArgumentError("well edge width D must be positive");
    if (s.width < 0.0) throw ArgumentError("well width must be non-negative");
    if (s.depth < 0.0) throw ArgumentError("well depth must be non-negative");
}

inline void validate(const DriveMode& drive) {
    std::visit(
        [](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, StaticWell>) {
                validate(d.shape);
            } else if constexpr (std::is_same_v<T, WidthOscillation>) {
                if (!(d.omega > 0.0)) throw ArgumentError("drive frequency must be positive");
                if (d.width_min < 0.0 || d.width_max < d.width_min)
                    throw ArgumentError("width bounds must satisfy 0 <= W1 <= W2");
                validate(WellShape{d.depth, d.width_max, d.edge});
            } else {
                if (!(d.omega > 0.0)) throw ArgumentError("drive frequency must be positive");
                if (d.depth_min < 0.0 || d.depth_max < d.depth_min)
                    throw ArgumentError("depth bounds must satisfy 0 <= V1 <= V2");
                validate(WellShape{d.depth_max, d.width, d.edge});
            }
        },
        drive);
}

// [1 + sin(w t - pi/2)] / 2 written as (1 - cos(w t)) / 2: identical values,
// and exactly zero at integer periods.
inline double drive_envelope(double omega, double t) { return 0.5 * (1.0 - std::cos(omega * t)); }

inline double width_at(const WidthOscillation& d, double t) {
    return d.width_min + (d.width_max - d.width_min) * drive_envelope(d.omega, t);
}

inline double depth_at(const DepthOscillation& d, double t) {
    return d.depth_min + (d.depth_max - d.depth_min) * drive_envelope(d.omega, t);
}

/// Drive period 2 pi / omega; zero for a static well.
inline double period(const DriveMode& drive) {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, StaticWell>) return 0.0;
            else return 2.0 * kPi / d.omega;
        },
        drive);
}

inline double angular_frequency(const DriveMode& drive) {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, StaticWell>) return 0.0;
            else return d.omega;
        },
        drive);
}

/// Instantaneous well parameters.
inline WellShape shape_at(const DriveMode& drive, double t) {
    return std::visit(
        [t](const auto& d) -> WellShape {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, StaticWell>) return d.shape;
            else if constexpr (std::is_same_v<T, WidthOscillation>)
                return {d.depth, width_at(d, t), d.edge};
            else return {depth_at(d, t), d.width, d.edge};
        },
        drive);
}

/// True when the drive's lower turning point is the empty well, so the
/// potential vanishes at every integer period.
inline bool vanishes_at_period_boundaries(const DriveMode& drive) {
    return std::visit(
        [](const auto& d) -> bool {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, StaticWell>) return d.shape.depth == 0.0 || d.shape.width == 0.0;
            else if constexpr (std::is_same_v<T, WidthOscillation>) return d.width_min == 0.0 || d.depth == 0.0;
            else return d.depth_min == 0.0 || d.width == 0.0;
        },
        drive);
}

inline double well_profile(const WellShape& s, double z) {
    const double half = 0.5 * s.width;
    return 0.5 * s.depth * (std::tanh((z - half) / s.edge) - std::tanh((z + half) / s.edge));
}

inline std::vector<double> sample_potential(const WellShape& s, const SpatialGrid& grid) {
    std::vector<double> v(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) v[j] = well_profile(s, grid.position(j));
    return v;
}

inline std::vector<double> sample_potential(const DriveMode& drive, const SpatialGrid& grid, double t) {
    return sample_potential(shape_at(drive, t), grid);
}

/// Same as sample_potential, writing into a caller-owned buffer.
inline void sample_potential_into(const DriveMode& drive, const SpatialGrid& grid, double t, std::span<double> out) {
    if (out.size() != grid.size()) throw ArgumentError("sample_potential: buffer length mismatch");
    const WellShape s = shape_at(drive, t);
    for (std::size_t j = 0; j < grid.size(); ++j) out[j] = well_profile(s, grid.position(j));
}

inline std::string drive_name(const DriveMode& drive) {
    switch (drive.index()) {
    case 0: return "static";
    case 1: return "width";
    default: return "depth";
    }
}

} // namespace pairpump
