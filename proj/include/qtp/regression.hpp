#pragma once

#include <array>

// Measured values frozen as regression ceilings. Each is the larger of the coarse and refined
// measurement, rounded up in the fourth significant digit.
namespace qtp::regression {

/// Caccioppoli radii pairs (s, t).
inline constexpr std::array<std::array<double, 2>, 3> kCaccioppoliRadii{{{0.5, 0.75}, {0.5, 1.0}, {0.6, 0.9}}};

/// Empirical hole-filling constants, one per radii pair.
inline constexpr std::array<double, 3> kCaccioppoliOracleP2{0.02162, 0.05054, 0.03387};
inline constexpr std::array<double, 3> kCaccioppoliOracleP3{0.01392, 0.08426, 0.03327};
inline constexpr std::array<double, 3> kCaccioppoliDiscP2{0.01998, 0.04016, 0.06187};

/// Harnack ratio on the oracle's positive branch, ball centred at x = 0.2.
inline constexpr double kHarnackOracleP2 = 1.424;
inline constexpr double kHarnackOracleP3 = 1.415;

/// Floor for the fitted exponent at a zero of the solved disc case.
inline constexpr double kDyadicAlphaFloor = 0.85;

}  // namespace qtp::regression
