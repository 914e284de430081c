#pragma once

#include <numbers>

namespace sponge::units {

// Gauge pressure in bar, everything else SI.

/// Reference pressure of the lumped isothermal capacitances (1 bar).
inline constexpr double kRefPressureBar = 1.0;
inline constexpr double kStandardGravity = 9.81;

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace sponge::units
