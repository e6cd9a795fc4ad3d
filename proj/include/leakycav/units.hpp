#pragma once

// Internal units: hbar = c = k_B = 1 with lengths in metres, so angular
// frequencies are in 1/m, times in m, and beta = hbar c / (k_B T) in m.

namespace leakycav::units {

constexpr double c = 299792458.0;          // m/s
constexpr double hbar = 1.054571817e-34;   // J s
constexpr double k_B = 1.380649e-23;       // J/K

inline double rate_to_si(double per_metre) { return per_metre * c; }
inline double rate_from_si(double per_second) { return per_second / c; }
inline double time_to_si(double metres) { return metres / c; }
inline double time_from_si(double seconds) { return seconds * c; }

// Inverse temperature in metres.
inline double beta_from_kelvin(double kelvin) { return hbar * c / (k_B * kelvin); }

}  // namespace leakycav::units
