#pragma once

namespace coexist {

// Exact SI defining constants.
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPlanck = 6.62607015e-34;     // J*s
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr const char* kVersion = "0.1.0";

}  // namespace coexist
