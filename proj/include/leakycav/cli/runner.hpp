#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "leakycav/cli/config.hpp"
#include "leakycav/cli/output.hpp"

namespace leakycav::cli {

inline constexpr const char* tool_version = "1.0.0";
inline constexpr const char* out_dir_env = "LEAKYCAV_OUT_DIR";

struct RunOptions {
  std::optional<std::string> out_dir;  // beats the environment, which beats the config
  std::optional<Format> format;
  int jobs = 1;
};

struct MethodSeries {
  std::string method;
  Table table;
  std::size_t failed_rows = 0;
  std::vector<std::string> errors;  // distinct messages, in order of appearance
  bool failed = false;              // the method could not run at all
};

struct RunResult {
  std::vector<std::string> files;
  std::vector<std::string> warnings;
  int exit_code = 0;
};

// Runs fn(0) .. fn(n-1) on up to jobs threads; rethrows the first exception.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

std::string config_hash(const Scenario& s);
std::string resolve_out_dir(const Scenario& s, const RunOptions& opt);

// In-memory computations behind the subcommands.
MethodSeries compute_method(const Scenario& s, const Resolved& r, const std::string& method);
std::vector<MethodSeries> compute_series(const Scenario& s, const Resolved& r, int jobs);
Table compute_sweep(const Scenario& s, int jobs, std::vector<std::string>* errors = nullptr);
Table compute_threshold(const Scenario& s, const Resolved& r, int jobs);
Table compute_modes(const Scenario& s);

RunResult run_scenario(const Scenario& s, const RunOptions& opt);
RunResult run_sweep(const Scenario& s, const RunOptions& opt);
RunResult run_threshold(const Scenario& s, const RunOptions& opt);
RunResult run_modes(const Scenario& s, const RunOptions& opt);
// Validation plus resolution; returns warnings.
std::vector<std::string> check_scenario(const Scenario& s);

}  // namespace leakycav::cli
