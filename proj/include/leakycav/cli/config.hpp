#pragma once

#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leakycav/cavity_modes.hpp"
#include "leakycav/effective_dynamics.hpp"

namespace leakycav::cli {

enum class Units { SI, Natural };
enum class InputMode { Effective, Geometry };
enum class Format { Csv, Json };

inline const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> m{"quadratic",  "master-analytic", "master-numeric",
                                          "propagator", "fock-oracle",     "detuning"};
  return m;
}

inline const std::vector<std::string>& sweepable_parameters() {
  static const std::vector<std::string> p{"epsilon", "gamma", "T", "beta", "delta", "Delta"};
  return p;
}

struct Scenario {
  nlohmann::json source;  // the configuration as read, used for hashing and the sidecar
  Units units = Units::SI;
  InputMode input = InputMode::Effective;

  // effective input (SI: 1/s and rad/s)
  double xi = 0.0;
  double chi = 0.0;
  std::optional<double> omega_L;
  std::optional<double> omega_R;

  // geometry input (SI: metres and 1/m)
  CavityConfig cavity;
  DriveConfig drive;

  // temperature: exactly one of these routes
  std::optional<double> kelvin;
  std::optional<double> beta;  // SI: seconds
  std::optional<double> n_L0;
  std::optional<double> n_R0;

  std::optional<double> delta;
  std::optional<double> Delta;

  std::vector<std::string> methods;
  double t_start = 0.0;
  double t_end = 1.0;
  int samples = 2;

  int master_cutoff = 0;  // 0: automatic
  double master_rtol = 1e-10;
  double master_atol = 1e-12;
  int fock_cutoff_L = 0;
  int fock_cutoff_R = 0;

  std::string out_dir = ".";
  std::string stem = "leakycav";
  Format format = Format::Csv;

  // sweep
  bool sweep_zip = false;
  std::vector<std::pair<std::string, std::vector<double>>> sweep;  // in declaration order
  long sweep_cap = 10000;

  // threshold scan
  std::vector<double> threshold_Delta;
  int threshold_scan_points = 4000;

  int modes_k_max = 8;

  std::vector<double> times() const;
  bool has_method(const std::string& m) const;
};

// Physical quantities after geometry solving and unit handling, in the
// scenario's unit system (SI: rates in 1/s, times in s).
struct Resolved {
  double xi = 0.0;
  double chi = 0.0;
  double eta = 0.0;  // NaN in effective mode
  double omega_L = 0.0;
  double omega_R = 0.0;
  double omega_Lx = 0.0;  // NaN in effective mode
  double n_L0 = 0.0;
  double n_R0 = 0.0;
  double delta = 0.0;
  double Delta = 0.0;
  double epsilon = 0.0;  // NaN in effective mode
  std::vector<std::string> warnings;
};

// Throws ValidationError with a field path on malformed input. A metadata
// sidecar is accepted too; its embedded configuration is used.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

Resolved resolve(const Scenario& s);

// Copy with one sweep parameter applied.
Scenario with_parameter(const Scenario& s, const std::string& name, double value);

}  // namespace leakycav::cli
