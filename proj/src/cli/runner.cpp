#include "leakycav/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <limits>
#include <mutex>
#include <thread>

#include "leakycav/detuning.hpp"
#include "leakycav/errors.hpp"
#include "leakycav/fock_oracle.hpp"
#include "leakycav/lindblad.hpp"
#include "leakycav/propagator.hpp"
#include "leakycav/response.hpp"
#include "leakycav/units.hpp"

namespace leakycav::cli {

namespace {

using nlohmann::json;

void note(std::vector<std::string>& errors, const std::string& msg) {
  if (std::find(errors.begin(), errors.end(), msg) == errors.end()) errors.push_back(msg);
}

std::vector<Cell> failed_row(double T, std::size_t width) {
  std::vector<Cell> row(width);
  row.front() = T;
  row.back() = 0LL;
  return row;
}

long long flag(bool b) { return b ? 1 : 0; }

int master_cutoff(const Scenario& s, const Resolved& r) {
  return s.master_cutoff > 0 ? s.master_cutoff : choose_cutoff(r.n_L0);
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json metadata(const Scenario& s, const Resolved& r) {
  json m;
  m["units"] = s.units == Units::SI ? "SI" : "natural";
  m["input_mode"] = s.input == InputMode::Geometry ? "geometry" : "effective";
  m["xi"] = number_or_null(r.xi);
  m["chi"] = number_or_null(r.chi);
  m["eta"] = number_or_null(r.eta);
  m["epsilon"] = number_or_null(r.epsilon);
  m["omega_L"] = number_or_null(r.omega_L);
  m["omega_R"] = number_or_null(r.omega_R);
  m["omega_Lx"] = number_or_null(r.omega_Lx);
  m["n_L0"] = number_or_null(r.n_L0);
  m["n_R0"] = number_or_null(r.n_R0);
  m["delta"] = number_or_null(r.delta);
  m["Delta"] = number_or_null(r.Delta);
  return m;
}

json sidecar(const Scenario& s, const std::string& command) {
  json j;
  j["tool"] = "leakycav";
  j["version"] = tool_version;
  j["command"] = command;
  j["config_hash"] = config_hash(s);
  j["config"] = s.source;
  return j;
}

std::string path_in(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string extension(Format f) { return f == Format::Json ? ".json" : ".csv"; }

std::string render(const Table& t, Format f) { return f == Format::Json ? t.to_json() : t.to_csv(); }

Format chosen_format(const Scenario& s, const RunOptions& opt) { return opt.format.value_or(s.format); }

// Evaluation of one method at one time, for sweeps.
struct Point {
  double n_L = std::numeric_limits<double>::quiet_NaN();
  double n_R = std::numeric_limits<double>::quiet_NaN();
  bool valid = false;
  std::optional<double> growth;
};

Point evaluate_at(const Scenario& s, const Resolved& r, const std::string& method, double T) {
  Point p;
  if (method == "quadratic") {
    const Prediction a = n_left_quadratic(r.xi, r.chi, T, r.n_L0, r.n_R0);
    const Prediction b = n_right_quadratic(r.xi, r.chi, T, r.n_L0, r.n_R0);
    p.n_L = a.value;
    p.n_R = b.value;
    p.valid = a.valid && b.valid;
  } else if (method == "propagator") {
    const FullOccupations f = full_occupations(r.xi, r.chi, T, r.n_L0, r.n_R0);
    p.n_L = f.n_L;
    p.n_R = f.n_R;
    p.valid = std::isfinite(f.n_L) && std::isfinite(f.n_R);
  } else if (method == "master-analytic") {
    const TruncatedDensity rho0 = thermal_density(r.n_L0, master_cutoff(s, r));
    const TruncatedDensity rho = rho_L_approx(rho0, integrated_coefficients(r.xi, r.chi, r.n_R0, T));
    p.n_L = squeezed_number_expectation(rho, r.xi, T);
    p.valid = rho.min_eigenvalue() >= -1e-6;
  } else if (method == "master-numeric") {
    const TruncatedDensity rho0 = thermal_density(r.n_L0, master_cutoff(s, r));
    const MasterSeries m =
        propagate_master_series(rho0, r.xi, r.chi, r.n_R0, {T}, s.master_rtol, s.master_atol);
    p.n_L = m.n_L[0];
    p.valid = m.valid[0];
  } else if (method == "fock-oracle") {
    const int dl = s.fock_cutoff_L > 0 ? s.fock_cutoff_L : choose_cutoff(r.n_L0, 1e-8, 24);
    const int dr = s.fock_cutoff_R > 0 ? s.fock_cutoff_R : choose_cutoff(r.n_R0, 1e-8, 8);
    const auto e = evolve_series(r.xi, r.chi, dl, dr, thermal_two_mode_weights(r.n_L0, r.n_R0, dl, dr), {T});
    p.n_L = e[0].n_L;
    p.n_R = e[0].n_R;
    p.valid = e[0].truncation_ok;
  } else if (method == "detuning") {
    const DetuningParams dp{r.delta, r.Delta, r.omega_L};
    const auto n = detuned_occupations(r.xi, r.chi, dp, T, r.n_L0, r.n_R0);
    p.n_L = n[0];
    p.n_R = n[1];
    p.valid = std::isfinite(n[0]) && std::isfinite(n[1]);
    p.growth = max_growth_rate(r.xi, r.chi, dp);
  }
  return p;
}

}  // namespace

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

std::string config_hash(const Scenario& s) { return "fnv1a64:" + hex64(fnv1a64(s.source.dump())); }

std::string resolve_out_dir(const Scenario& s, const RunOptions& opt) {
  if (opt.out_dir) return *opt.out_dir;
  if (const char* env = std::getenv(out_dir_env); env && *env) return env;
  return s.out_dir;
}

MethodSeries compute_method(const Scenario& s, const Resolved& r, const std::string& method) {
  MethodSeries ms;
  ms.method = method;
  const std::vector<double> times = s.times();
  const bool two_modes = method != "master-analytic" && method != "master-numeric";
  if (method == "fock-oracle") ms.table.columns = {"T", "n_L", "n_R", "top_population", "valid"};
  else if (two_modes) ms.table.columns = {"T", "n_L", "n_R", "valid"};
  else ms.table.columns = {"T", "n_L", "trace", "min_eigenvalue", "valid"};
  const std::size_t width = ms.table.columns.size();

  auto fail_all = [&](const std::string& msg) {
    ms.failed = true;
    note(ms.errors, msg);
    ms.table.rows.clear();
    for (double T : times) ms.table.rows.push_back(failed_row(T, width));
    ms.failed_rows = times.size();
  };

  try {
    if (method == "master-numeric") {
      const TruncatedDensity rho0 = thermal_density(r.n_L0, master_cutoff(s, r));
      const MasterSeries m = propagate_master_series(rho0, r.xi, r.chi, r.n_R0, times, s.master_rtol, s.master_atol);
      for (std::size_t i = 0; i < times.size(); ++i) {
        ms.table.rows.push_back({times[i], m.n_L[i], m.trace[i], m.min_eigenvalue[i], flag(m.valid[i])});
        if (!m.valid[i]) ++ms.failed_rows;
      }
      if (m.first_positivity_failure)
        note(ms.errors, "positivity lost at T = " + format_double(*m.first_positivity_failure));
      return ms;
    }
    if (method == "fock-oracle") {
      const int dl = s.fock_cutoff_L > 0 ? s.fock_cutoff_L : choose_cutoff(r.n_L0, 1e-8, 24);
      const int dr = s.fock_cutoff_R > 0 ? s.fock_cutoff_R : choose_cutoff(r.n_R0, 1e-8, 8);
      if (static_cast<long long>(dl) * dr > 200000)
        throw ValidationError("fock-oracle: cutoff product " + std::to_string(static_cast<long long>(dl) * dr) +
                              " too large; lower the occupations or set fock.cutoff_L/R");
      const auto e = evolve_series(r.xi, r.chi, dl, dr, thermal_two_mode_weights(r.n_L0, r.n_R0, dl, dr), times);
      for (std::size_t i = 0; i < times.size(); ++i) {
        const double top = std::max(e[i].top_population_L, e[i].top_population_R);
        ms.table.rows.push_back({times[i], e[i].n_L, e[i].n_R, top, flag(e[i].truncation_ok)});
        if (!e[i].truncation_ok) ++ms.failed_rows;
      }
      if (ms.failed_rows) note(ms.errors, "Fock truncation budget exceeded on some rows");
      return ms;
    }
    std::optional<TruncatedDensity> rho0;
    if (method == "master-analytic") rho0 = thermal_density(r.n_L0, master_cutoff(s, r));
    for (double T : times) {
      try {
        if (method == "master-analytic") {
          const TruncatedDensity rho = rho_L_approx(*rho0, integrated_coefficients(r.xi, r.chi, r.n_R0, T));
          const double lmin = rho.min_eigenvalue();
          const bool ok = lmin >= -1e-6;
          ms.table.rows.push_back({T, squeezed_number_expectation(rho, r.xi, T), rho.trace(), lmin, flag(ok)});
          if (!ok) ++ms.failed_rows;
        } else {
          const Point p = evaluate_at(s, r, method, T);
          ms.table.rows.push_back({T, p.n_L, p.n_R, flag(p.valid)});
          if (!p.valid) ++ms.failed_rows;
        }
      } catch (const std::exception& e) {
        note(ms.errors, e.what());
        ms.table.rows.push_back(failed_row(T, width));
        ++ms.failed_rows;
      }
    }
  } catch (const std::exception& e) {
    fail_all(e.what());
  }
  return ms;
}

std::vector<MethodSeries> compute_series(const Scenario& s, const Resolved& r, int jobs) {
  std::vector<MethodSeries> out(s.methods.size());
  parallel_for(s.methods.size(), jobs, [&](std::size_t i) { out[i] = compute_method(s, r, s.methods[i]); });
  return out;
}

Table compute_sweep(const Scenario& s, int jobs, std::vector<std::string>* errors) {
  if (s.sweep.empty()) throw ValidationError("config: sweep: no sweep section");
  std::vector<std::vector<double>> points;
  if (s.sweep_zip) {
    for (std::size_t i = 0; i < s.sweep.front().second.size(); ++i) {
      std::vector<double> p;
      for (const auto& [name, vals] : s.sweep) p.push_back(vals[i]);
      points.push_back(p);
    }
  } else {
    long double total = 1;
    for (const auto& [name, vals] : s.sweep) total *= vals.size();
    if (total > s.sweep_cap)
      throw ValidationError("config: sweep: " + std::to_string(static_cast<long long>(total)) +
                            " points exceed the cap of " + std::to_string(s.sweep_cap));
    points.push_back({});
    for (const auto& [name, vals] : s.sweep) {
      std::vector<std::vector<double>> next;
      for (const auto& p : points)
        for (double v : vals) {
          auto q = p;
          q.push_back(v);
          next.push_back(q);
        }
      points = std::move(next);
    }
  }
  if (static_cast<long>(points.size()) > s.sweep_cap)
    throw ValidationError("config: sweep: " + std::to_string(points.size()) + " points exceed the cap of " +
                          std::to_string(s.sweep_cap));

  Table t;
  t.columns = {"point"};
  for (const auto& [name, vals] : s.sweep) t.columns.push_back(name);
  for (const char* c : {"xi", "chi", "eta", "n_L0", "n_R0", "delta", "Delta", "T", "method", "n_L", "n_R",
                        "valid", "growth_rate", "grows"})
    t.columns.push_back(c);

  std::vector<std::vector<std::vector<Cell>>> blocks(points.size());
  std::vector<std::vector<std::string>> errs(points.size());
  parallel_for(points.size(), jobs, [&](std::size_t k) {
    Scenario sc = s;
    for (std::size_t i = 0; i < s.sweep.size(); ++i) sc = with_parameter(sc, s.sweep[i].first, points[k][i]);
    std::vector<Cell> head{static_cast<long long>(k)};
    for (double v : points[k]) head.push_back(v);
    std::optional<Resolved> r;
    try {
      r = resolve(sc);
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception& e) {
      note(errs[k], "point " + std::to_string(k) + ": " + e.what());
    }
    for (const auto& m : s.methods) {
      std::vector<Cell> row = head;
      if (r) {
        for (double v : {r->xi, r->chi, r->eta, r->n_L0, r->n_R0, r->delta, r->Delta})
          row.push_back(std::isfinite(v) ? Cell(v) : Cell());
      } else {
        row.insert(row.end(), 7, Cell());
      }
      row.push_back(sc.t_end);
      row.push_back(m);
      Point p;
      if (r) {
        try {
          p = evaluate_at(sc, *r, m, sc.t_end);
        } catch (const std::exception& e) {
          note(errs[k], "point " + std::to_string(k) + " " + m + ": " + e.what());
          p = Point{};
        }
      }
      row.push_back(std::isfinite(p.n_L) ? Cell(p.n_L) : Cell());
      row.push_back(std::isfinite(p.n_R) ? Cell(p.n_R) : Cell());
      row.push_back(flag(p.valid));
      if (p.growth) {
        row.push_back(*p.growth);
        row.push_back(flag(*p.growth > 1e-7 * std::max(std::abs(r->xi), std::abs(r->chi))));
      } else {
        row.push_back(Cell());
        row.push_back(Cell());
      }
      blocks[k].push_back(std::move(row));
    }
  });
  for (std::size_t k = 0; k < points.size(); ++k) {
    for (auto& row : blocks[k]) t.rows.push_back(std::move(row));
    if (errors)
      for (const auto& e : errs[k]) errors->push_back(e);
  }
  return t;
}

Table compute_threshold(const Scenario& s, const Resolved& r, int jobs) {
  if (!s.has_method("detuning")) throw ValidationError("config: methods: threshold scans need the detuning method");
  if (!std::isfinite(r.omega_L)) throw ValidationError("config: effective.omega_L: required for threshold scans");
  const std::vector<double> Deltas = s.threshold_Delta.empty() ? std::vector<double>{r.Delta} : s.threshold_Delta;
  Table t;
  t.columns = {"Delta", "delta_c", "analytic_bound", "ideal", "ideal_drive", "growth_at_zero"};
  t.rows.resize(Deltas.size());
  const double ideal_drive = std::isfinite(r.epsilon) ? ideal_threshold_from_drive(r.epsilon, r.omega_L, r.omega_Lx)
                                                      : std::numeric_limits<double>::quiet_NaN();
  parallel_for(Deltas.size(), jobs, [&](std::size_t i) {
    const ThresholdResult th = growth_threshold(r.xi, r.chi, r.omega_L, Deltas[i], s.threshold_scan_points);
    t.rows[i] = {Deltas[i], th.delta_c ? Cell(*th.delta_c) : Cell(), th.analytic_bound, th.ideal,
                 std::isfinite(ideal_drive) ? Cell(ideal_drive) : Cell(), flag(th.growth_at_zero)};
  });
  return t;
}

Table compute_modes(const Scenario& s) {
  if (s.input != InputMode::Geometry) throw ValidationError("config: mode: the modes command needs mode = \"geometry\"");
  const double to_out = s.units == Units::SI ? units::c : 1.0;
  Table t;
  t.columns = {"class", "nx", "ny", "nz", "omega_x", "omega_total", "eta_mu", "m_LR"};
  const Mode fund = fundamental_mode(s.cavity);
  for (ModeClass cls : {ModeClass::LeftDominated, ModeClass::RightDominated}) {
    const std::vector<double> roots = solve_transverse_frequencies(s.cavity, s.modes_k_max, cls);
    for (int k = 1; k <= s.modes_k_max; ++k) {
      Mode m;
      m.nx = k;
      m.cls = cls;
      m.omega_x = roots[k - 1];
      m.omega_total = mode_frequency(s.cavity, m);
      Cell mlr;
      if (cls == ModeClass::RightDominated) {
        try {
          mlr = geometry_factor(s.cavity, fund, m);
        } catch (const NumericError&) {
        }
      }
      const double eta = std::isinf(s.cavity.gamma) ? 0.0 : m.omega_x / s.cavity.gamma;
      t.rows.push_back({std::string(to_string(cls)), static_cast<long long>(k), 1LL, 1LL, m.omega_x * to_out,
                        m.omega_total * to_out, eta, mlr});
    }
  }
  return t;
}

RunResult run_scenario(const Scenario& s, const RunOptions& opt) {
  RunResult res;
  const Resolved r = resolve(s);
  res.warnings = r.warnings;
  const std::vector<MethodSeries> series = compute_series(s, r, opt.jobs);
  const std::string dir = resolve_out_dir(s, opt);
  const Format fmt = chosen_format(s, opt);
  json side = sidecar(s, "run");
  side["metadata"] = metadata(s, r);
  if (s.has_method("detuning"))
    side["metadata"]["growth_rate"] = max_growth_rate(r.xi, r.chi, DetuningParams{r.delta, r.Delta, r.omega_L});
  side["warnings"] = r.warnings;
  side["outputs"] = json::array();
  for (const auto& m : series) {
    const std::string name = s.stem + "_" + m.method + extension(fmt);
    write_text(path_in(dir, name), render(m.table, fmt));
    res.files.push_back(path_in(dir, name));
    side["outputs"].push_back({{"method", m.method},
                               {"file", name},
                               {"rows", m.table.rows.size()},
                               {"invalid_rows", m.failed_rows},
                               {"errors", m.errors}});
    for (const auto& e : m.errors) res.warnings.push_back(m.method + ": " + e);
    if (m.failed) res.exit_code = 2;
  }
  write_text(path_in(dir, s.stem + ".json"), side.dump(2) + "\n");
  res.files.push_back(path_in(dir, s.stem + ".json"));
  return res;
}

RunResult run_sweep(const Scenario& s, const RunOptions& opt) {
  RunResult res;
  std::vector<std::string> errors;
  const Table t = compute_sweep(s, opt.jobs, &errors);
  const std::string dir = resolve_out_dir(s, opt);
  const Format fmt = chosen_format(s, opt);
  const std::string name = s.stem + "_sweep" + extension(fmt);
  write_text(path_in(dir, name), render(t, fmt));
  json side = sidecar(s, "sweep");
  side["outputs"] = json::array({{{"file", name}, {"rows", t.rows.size()}, {"errors", errors}}});
  write_text(path_in(dir, s.stem + "_sweep_meta.json"), side.dump(2) + "\n");
  res.files = {path_in(dir, name), path_in(dir, s.stem + "_sweep_meta.json")};
  res.warnings = errors;
  return res;
}

RunResult run_threshold(const Scenario& s, const RunOptions& opt) {
  RunResult res;
  const Resolved r = resolve(s);
  res.warnings = r.warnings;
  const Table t = compute_threshold(s, r, opt.jobs);
  const std::string dir = resolve_out_dir(s, opt);
  const Format fmt = chosen_format(s, opt);
  const std::string name = s.stem + "_threshold" + extension(fmt);
  write_text(path_in(dir, name), render(t, fmt));
  json side = sidecar(s, "threshold");
  side["metadata"] = metadata(s, r);
  side["outputs"] = json::array({{{"file", name}, {"rows", t.rows.size()}}});
  write_text(path_in(dir, s.stem + "_threshold_meta.json"), side.dump(2) + "\n");
  res.files = {path_in(dir, name), path_in(dir, s.stem + "_threshold_meta.json")};
  return res;
}

RunResult run_modes(const Scenario& s, const RunOptions& opt) {
  RunResult res;
  const Table t = compute_modes(s);
  const std::string dir = resolve_out_dir(s, opt);
  const Format fmt = chosen_format(s, opt);
  const std::string name = s.stem + "_modes" + extension(fmt);
  write_text(path_in(dir, name), render(t, fmt));
  res.files = {path_in(dir, name)};
  return res;
}

std::vector<std::string> check_scenario(const Scenario& s) { return resolve(s).warnings; }

}  // namespace leakycav::cli
