#pragma once

// Atomic units: m = hbar = e = 1.

namespace pairpump {

struct PhysicalConstants {
    static constexpr double c = 137.0359991;
    static constexpr double c2 = c * c;
    static constexpr double lambda_c = 1.0 / c;
};

inline constexpr double kSpeedOfLight = PhysicalConstants::c;
inline constexpr double kRestEnergy = PhysicalConstants::c2;
inline constexpr double kComptonWavelength = PhysicalConstants::lambda_c;
inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Convert from paper-facing units (c^2 for energies, lambda_C for lengths).
constexpr double from_c2(double x) { return x * kRestEnergy; }
constexpr double from_lambda_c(double x) { return x * kComptonWavelength; }
constexpr double to_c2(double x) { return x / kRestEnergy; }
constexpr double to_lambda_c(double x) { return x / kComptonWavelength; }

} // namespace pairpump
