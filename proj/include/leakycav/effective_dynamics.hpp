#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "leakycav/cavity_modes.hpp"

namespace leakycav {

struct DriveConfig {
  double epsilon = 0.0;   // a(t) = a0 + epsilon (b - a0) sin(omega t)
  double omega = 0.0;     // <= 0 means "use 2 Omega_L"
  double duration = 0.0;  // T
};

struct EffectiveParams {
  double xi = 0.0;
  std::vector<double> chis{0.0};
  double omega_L = 0.0;
  double omega_R = 0.0;
};

struct ThermalState {
  double beta = std::numeric_limits<double>::infinity();
  double n_L0 = 0.0;
  double n_R0 = 0.0;
};

// Non-fatal regime warnings (epsilon too large, omega T too small).
std::vector<std::string> drive_warnings(const DriveConfig& drive, double omega_L);

double squeezing_parameter(double epsilon, double omega_L, double omega_Lx);
double squeezing_parameter(const CavityConfig& cavity, const DriveConfig& drive);

double velocity_parameter(double epsilon, double omega_L, double omega_R, double left_length,
                          double m_LR);
double velocity_parameter(const CavityConfig& cavity, const DriveConfig& drive,
                          const Mode& right_mode);

// 1/(exp(beta omega) - 1); beta = +inf or beta*omega > 700 gives 0.
double thermal_occupation(double beta, double omega);
ThermalState thermal_state(double beta, double omega_L, double omega_R);

struct ResonantPair {
  Mode partner;            // right-dominated mode paired with the fundamental L
  bool sum = false;        // omega = Omega_L + Omega_nu (otherwise difference)
  double mismatch = 0.0;   // (|Omega_L +/- Omega_nu| - omega) / omega
};

struct ResonanceReport {
  Mode left;
  double omega = 0.0;
  double delta = 0.0;                    // omega / (2 Omega_L) - 1
  std::vector<ResonantPair> flagged;     // all pairs within tol
  std::optional<Mode> partner;           // resonant difference partner with ny = nz = 1
  std::optional<Mode> nearest_partner;   // closest difference candidate with ny = nz = 1
  double Delta = std::numeric_limits<double>::quiet_NaN();  // of partner or nearest
};

double default_resonance_tol(const DriveConfig& drive, double omega);

// Right-mode candidates up to frequency_cap (default 1.1 (omega + Omega_L)).
ResonanceReport resonance_report(const CavityConfig& cavity, const DriveConfig& drive, double tol,
                                 double frequency_cap = 0.0);

}  // namespace leakycav
