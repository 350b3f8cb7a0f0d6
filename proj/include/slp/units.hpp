#pragma once

#include <string>

namespace slp {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kTwoPi = 6.28318530717958647692528676655900577;

// Parses a scalar with an optional unit suffix, e.g. "60", "5.8 MHz_x2pi",
// "10 mm", "2us". Frequencies with a "_x2pi" suffix convert to angular
// frequency (rad/s); bare Hz-family units stay in cycles/s. Throws
// std::invalid_argument on malformed input or unknown units.
double parse_quantity(const std::string& text);

// Multiplier for one unit token ("MHz", "us", ...). Throws on unknown unit.
double unit_factor(const std::string& unit);

}  // namespace slp
