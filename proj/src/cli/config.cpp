#include "leakycav/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "leakycav/errors.hpp"
#include "leakycav/units.hpp"

namespace leakycav::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError("config: " + path + ": " + what);
}

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number(const json& v, const std::string& path) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    fail(path, "expected a number");
  }
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (std::isnan(x)) fail(path, "must not be NaN");
  return x;
}

std::optional<double> opt_number(const json& obj, const std::string& key, const std::string& base) {
  const json* v = find(obj, key);
  if (!v || v->is_null()) return std::nullopt;
  return number(*v, join(base, key));
}

double req_number(const json& obj, const std::string& key, const std::string& base) {
  const json* v = find(obj, key);
  if (!v) fail(join(base, key), "required");
  return number(*v, join(base, key));
}

double positive(double x, const std::string& path) {
  if (!(x > 0.0) || !std::isfinite(x)) fail(path, "must be finite and > 0");
  return x;
}

int integer(const json& v, const std::string& path, int lo) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > std::numeric_limits<int>::max()) fail(path, "must be >= " + std::to_string(lo));
  return static_cast<int>(x);
}

std::string str(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

const json& object(const json& obj, const std::string& key, const std::string& base) {
  const json* v = find(obj, key);
  if (!v) fail(join(base, key), "required");
  if (!v->is_object()) fail(join(base, key), "expected an object");
  return *v;
}

void reject_unknown(const json& obj, const std::string& base, std::initializer_list<const char*> keys) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
      fail(join(base, it.key()), "unknown field");
  }
}

std::vector<double> range(const json& v, const std::string& path) {
  std::vector<double> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  } else if (v.is_object()) {
    reject_unknown(v, path, {"start", "stop", "num", "scale"});
    const double a = req_number(v, "start", path);
    const double b = req_number(v, "stop", path);
    const json* n = find(v, "num");
    if (!n) fail(join(path, "num"), "required");
    const int num = integer(*n, join(path, "num"), 1);
    const std::string scale = find(v, "scale") ? str(v["scale"], join(path, "scale")) : "linear";
    if (scale != "linear" && scale != "log") fail(join(path, "scale"), "expected \"linear\" or \"log\"");
    if (scale == "log" && !(a > 0.0 && b > 0.0)) fail(path, "log range needs positive endpoints");
    for (int i = 0; i < num; ++i) {
      const double f = num == 1 ? 0.0 : static_cast<double>(i) / (num - 1);
      out.push_back(scale == "log" ? a * std::pow(b / a, f) : a + (b - a) * f);
    }
    if (num > 1) out.back() = b;
  } else {
    fail(path, "expected an array or {start, stop, num}");
  }
  if (out.empty()) fail(path, "empty range");
  return out;
}

}  // namespace

std::vector<double> Scenario::times() const {
  std::vector<double> t(samples);
  for (int i = 0; i < samples; ++i)
    t[i] = samples == 1 ? t_end : t_start + (t_end - t_start) * static_cast<double>(i) / (samples - 1);
  t.back() = t_end;
  return t;
}

bool Scenario::has_method(const std::string& m) const {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

Scenario parse_scenario(const json& input) {
  if (!input.is_object()) fail("<root>", "expected an object");
  // Metadata sidecars carry the configuration they were produced from.
  const json& j = (input.contains("tool") && input.contains("config")) ? input["config"] : input;
  if (!j.is_object()) fail("config", "expected an object");
  reject_unknown(j, "", {"units", "mode", "effective", "cavity", "drive", "temperature", "detuning",
                         "methods", "time_grid", "master", "fock", "output", "sweep", "threshold",
                         "modes", "description"});
  Scenario s;
  s.source = j;

  const json* u = find(j, "units");
  if (!u) fail("units", "required (\"SI\" or \"natural\")");
  const std::string units = str(*u, "units");
  if (units == "SI") s.units = Units::SI;
  else if (units == "natural") s.units = Units::Natural;
  else fail("units", "expected \"SI\" or \"natural\"");

  const std::string mode = find(j, "mode") ? str(j["mode"], "mode") : "effective";
  if (mode == "effective") s.input = InputMode::Effective;
  else if (mode == "geometry") s.input = InputMode::Geometry;
  else fail("mode", "expected \"effective\" or \"geometry\"");

  if (s.input == InputMode::Effective) {
    const json& e = object(j, "effective", "");
    reject_unknown(e, "effective", {"xi", "chi", "omega_L", "omega_R"});
    s.xi = req_number(e, "xi", "effective");
    s.chi = req_number(e, "chi", "effective");
    if (!(s.xi >= 0.0) || !std::isfinite(s.xi)) fail("effective.xi", "must be finite and >= 0");
    if (!std::isfinite(s.chi)) fail("effective.chi", "must be finite");
    s.omega_L = opt_number(e, "omega_L", "effective");
    s.omega_R = opt_number(e, "omega_R", "effective");
    if (s.omega_L) positive(*s.omega_L, "effective.omega_L");
    if (s.omega_R) positive(*s.omega_R, "effective.omega_R");
  } else {
    const json& c = object(j, "cavity", "");
    reject_unknown(c, "cavity", {"a0", "b", "c", "dy", "dz", "gamma"});
    s.cavity.a0 = req_number(c, "a0", "cavity");
    s.cavity.b = req_number(c, "b", "cavity");
    s.cavity.c = req_number(c, "c", "cavity");
    s.cavity.dy = req_number(c, "dy", "cavity");
    s.cavity.dz = req_number(c, "dz", "cavity");
    s.cavity.gamma = req_number(c, "gamma", "cavity");
    try {
      validate(s.cavity);
    } catch (const ValidationError& e) {
      fail("cavity", e.what());
    }
    const json& d = object(j, "drive", "");
    reject_unknown(d, "drive", {"epsilon", "omega"});
    s.drive.epsilon = positive(req_number(d, "epsilon", "drive"), "drive.epsilon");
    if (auto w = opt_number(d, "omega", "drive")) s.drive.omega = positive(*w, "drive.omega");
  }

  if (const json* t = find(j, "temperature")) {
    if (!t->is_object()) fail("temperature", "expected an object");
    reject_unknown(*t, "temperature", {"kelvin", "beta", "n_L0", "n_R0", "vacuum"});
    s.kelvin = opt_number(*t, "kelvin", "temperature");
    s.beta = opt_number(*t, "beta", "temperature");
    s.n_L0 = opt_number(*t, "n_L0", "temperature");
    s.n_R0 = opt_number(*t, "n_R0", "temperature");
    const bool vacuum = find(*t, "vacuum") && (*t)["vacuum"].is_boolean() && (*t)["vacuum"].get<bool>();
    const int routes = (s.kelvin ? 1 : 0) + (s.beta ? 1 : 0) + ((s.n_L0 || s.n_R0) ? 1 : 0) + (vacuum ? 1 : 0);
    if (routes != 1) fail("temperature", "give exactly one of kelvin, beta, {n_L0, n_R0}, vacuum");
    if (s.kelvin) {
      if (s.units != Units::SI) fail("temperature.kelvin", "only available with units = \"SI\"");
      positive(*s.kelvin, "temperature.kelvin");
    }
    if (s.beta && !(*s.beta > 0.0)) fail("temperature.beta", "must be > 0");
    if (s.n_L0 || s.n_R0) {
      if (!s.n_L0 || !s.n_R0) fail("temperature", "n_L0 and n_R0 go together");
      if (!(*s.n_L0 >= 0.0) || !std::isfinite(*s.n_L0)) fail("temperature.n_L0", "must be finite and >= 0");
      if (!(*s.n_R0 >= 0.0) || !std::isfinite(*s.n_R0)) fail("temperature.n_R0", "must be finite and >= 0");
    }
    if (vacuum) {
      s.n_L0 = 0.0;
      s.n_R0 = 0.0;
    }
  } else {
    s.n_L0 = 0.0;
    s.n_R0 = 0.0;
  }

  if (const json* d = find(j, "detuning")) {
    if (!d->is_object()) fail("detuning", "expected an object");
    reject_unknown(*d, "detuning", {"delta", "Delta"});
    s.delta = opt_number(*d, "delta", "detuning");
    s.Delta = opt_number(*d, "Delta", "detuning");
  }

  const json* m = find(j, "methods");
  if (!m || !m->is_array() || m->empty()) fail("methods", "non-empty array of method names required");
  for (std::size_t i = 0; i < m->size(); ++i) {
    const std::string path = "methods[" + std::to_string(i) + "]";
    const std::string name = str((*m)[i], path);
    const auto& km = known_methods();
    if (std::find(km.begin(), km.end(), name) == km.end()) fail(path, "unknown method \"" + name + "\"");
    if (s.has_method(name)) fail(path, "duplicate method \"" + name + "\"");
    s.methods.push_back(name);
  }

  const json& tg = object(j, "time_grid", "");
  reject_unknown(tg, "time_grid", {"t_start", "t_end", "samples"});
  s.t_start = opt_number(tg, "t_start", "time_grid").value_or(0.0);
  s.t_end = req_number(tg, "t_end", "time_grid");
  if (!(s.t_start >= 0.0) || !std::isfinite(s.t_start)) fail("time_grid.t_start", "must be finite and >= 0");
  if (!std::isfinite(s.t_end)) fail("time_grid.t_end", "must be finite");
  const json* ns = find(tg, "samples");
  if (!ns) fail("time_grid.samples", "required");
  s.samples = integer(*ns, "time_grid.samples", 1);
  if (s.samples > 1 && !(s.t_end > s.t_start)) fail("time_grid", "t_end must exceed t_start");
  if (s.samples == 1 && !(s.t_end >= s.t_start)) fail("time_grid", "t_end must not precede t_start");

  if (const json* ms = find(j, "master")) {
    if (!ms->is_object()) fail("master", "expected an object");
    reject_unknown(*ms, "master", {"cutoff", "rtol", "atol"});
    if (find(*ms, "cutoff")) s.master_cutoff = integer((*ms)["cutoff"], "master.cutoff", 3);
    if (auto v = opt_number(*ms, "rtol", "master")) s.master_rtol = positive(*v, "master.rtol");
    if (auto v = opt_number(*ms, "atol", "master")) s.master_atol = positive(*v, "master.atol");
  }
  if (const json* f = find(j, "fock")) {
    if (!f->is_object()) fail("fock", "expected an object");
    reject_unknown(*f, "fock", {"cutoff_L", "cutoff_R"});
    if (find(*f, "cutoff_L")) s.fock_cutoff_L = integer((*f)["cutoff_L"], "fock.cutoff_L", 2);
    if (find(*f, "cutoff_R")) s.fock_cutoff_R = integer((*f)["cutoff_R"], "fock.cutoff_R", 2);
  }
  if (const json* o = find(j, "output")) {
    if (!o->is_object()) fail("output", "expected an object");
    reject_unknown(*o, "output", {"dir", "stem", "format"});
    if (find(*o, "dir")) s.out_dir = str((*o)["dir"], "output.dir");
    if (find(*o, "stem")) s.stem = str((*o)["stem"], "output.stem");
    if (s.stem.empty() || s.stem.find('/') != std::string::npos) fail("output.stem", "must be a plain file stem");
    if (find(*o, "format")) {
      const std::string f = str((*o)["format"], "output.format");
      if (f == "csv") s.format = Format::Csv;
      else if (f == "json") s.format = Format::Json;
      else fail("output.format", "expected \"csv\" or \"json\"");
    }
  }
  if (const json* sw = find(j, "sweep")) {
    if (!sw->is_object()) fail("sweep", "expected an object");
    reject_unknown(*sw, "sweep", {"kind", "parameters", "cap"});
    const std::string kind = find(*sw, "kind") ? str((*sw)["kind"], "sweep.kind") : "cartesian";
    if (kind == "zip") s.sweep_zip = true;
    else if (kind != "cartesian") fail("sweep.kind", "expected \"cartesian\" or \"zip\"");
    if (find(*sw, "cap")) s.sweep_cap = integer((*sw)["cap"], "sweep.cap", 1);
    const json& p = object(*sw, "parameters", "sweep");
    if (p.empty()) fail("sweep.parameters", "at least one parameter required");
    const auto& allowed = sweepable_parameters();
    // Declaration order is not preserved by the JSON object; use the fixed order instead.
    for (const auto& name : allowed) {
      if (const json* r = find(p, name)) s.sweep.emplace_back(name, range(*r, "sweep.parameters." + name));
    }
    for (auto it = p.begin(); it != p.end(); ++it) {
      if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
        fail("sweep.parameters." + it.key(), "not a sweepable parameter");
    }
    if (s.sweep_zip) {
      for (const auto& [name, vals] : s.sweep)
        if (vals.size() != s.sweep.front().second.size())
          fail("sweep.parameters." + name, "zip sweeps need equal lengths");
    }
    for (const auto& [name, vals] : s.sweep) {
      if ((name == "epsilon" || name == "gamma") && s.input != InputMode::Geometry)
        fail("sweep.parameters." + name, "requires mode = \"geometry\"");
    }
  }
  if (const json* th = find(j, "threshold")) {
    if (!th->is_object()) fail("threshold", "expected an object");
    reject_unknown(*th, "threshold", {"Delta", "scan_points"});
    if (const json* d = find(*th, "Delta")) s.threshold_Delta = range(*d, "threshold.Delta");
    if (find(*th, "scan_points")) s.threshold_scan_points = integer((*th)["scan_points"], "threshold.scan_points", 10);
  }
  if (const json* md = find(j, "modes")) {
    if (!md->is_object()) fail("modes", "expected an object");
    reject_unknown(*md, "modes", {"k_max"});
    if (find(*md, "k_max")) s.modes_k_max = integer((*md)["k_max"], "modes.k_max", 1);
  }
  if (s.has_method("detuning") && s.input == InputMode::Effective && !s.omega_L)
    fail("effective.omega_L", "required by the detuning method");
  if ((s.kelvin || s.beta) && s.input == InputMode::Effective && (!s.omega_L || !s.omega_R))
    fail("effective", "omega_L and omega_R are required for a temperature given as kelvin or beta");
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config: " + path + ": " + e.what());
  }
  return parse_scenario(j);
}

Resolved resolve(const Scenario& s) {
  Resolved r;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  // Geometry is solved in 1/m; SI outputs are converted to 1/s.
  const double to_out = s.units == Units::SI ? units::c : 1.0;
  if (s.input == InputMode::Effective) {
    r.xi = s.xi;
    r.chi = s.chi;
    r.eta = nan;
    r.omega_L = s.omega_L.value_or(nan);
    r.omega_R = s.omega_R.value_or(nan);
    r.omega_Lx = nan;
    r.epsilon = nan;
    r.delta = s.delta.value_or(0.0);
    r.Delta = s.Delta.value_or(0.0);
  } else {
    DriveConfig drive = s.drive;
    if (drive.omega > 0.0) drive.omega /= to_out;
    drive.duration = s.t_end * to_out;
    const ResonanceReport rep = resonance_report(s.cavity, drive, default_resonance_tol(drive, drive.omega > 0.0 ? drive.omega : 2.0 * fundamental_mode(s.cavity).omega_total));
    if (!rep.nearest_partner) throw ValidationError("cavity: no right-dominated partner mode below the frequency cap");
    const Mode& L = rep.left;
    const Mode& R = *rep.nearest_partner;
    r.xi = squeezing_parameter(s.cavity, drive) * to_out;
    r.chi = velocity_parameter(s.cavity, drive, R) * to_out;
    r.eta = fundamental_eta(s.cavity);
    r.omega_L = L.omega_total * to_out;
    r.omega_R = R.omega_total * to_out;
    r.omega_Lx = L.omega_x * to_out;
    r.epsilon = s.drive.epsilon;
    r.delta = s.delta.value_or(rep.delta);
    r.Delta = s.Delta.value_or(rep.Delta);
    if (!rep.partner)
      r.warnings.push_back("no right-dominated mode satisfies the difference resonance within tolerance; using the nearest (Delta = " + std::to_string(rep.Delta) + ")");
    for (const auto& w : drive_warnings(drive, L.omega_total)) r.warnings.push_back(w);
  }
  if (s.kelvin || s.beta) {
    // SI: beta in seconds (hbar / k_B T), frequencies in rad/s.
    const double beta = s.kelvin ? units::hbar / (units::k_B * *s.kelvin) : *s.beta;
    r.n_L0 = thermal_occupation(beta, r.omega_L);
    r.n_R0 = thermal_occupation(beta, r.omega_R);
  } else {
    r.n_L0 = s.n_L0.value_or(0.0);
    r.n_R0 = s.n_R0.value_or(0.0);
  }
  if (std::abs(r.delta) > 0.1 || std::abs(r.Delta) > 0.1)
    r.warnings.push_back("|delta| or |Delta| above 0.1: detuned expansion unreliable");
  return r;
}

Scenario with_parameter(const Scenario& s, const std::string& name, double value) {
  Scenario o = s;
  if (name == "epsilon") {
    o.drive.epsilon = positive(value, "sweep.parameters.epsilon");
  } else if (name == "gamma") {
    o.cavity.gamma = positive(value, "sweep.parameters.gamma");
  } else if (name == "T") {
    if (!(value >= o.t_start) || !std::isfinite(value)) fail("sweep.parameters.T", "must be finite and >= t_start");
    o.t_end = value;
  } else if (name == "beta") {
    o.beta = positive(value, "sweep.parameters.beta");
    o.kelvin.reset();
    o.n_L0.reset();
    o.n_R0.reset();
    if (o.input == InputMode::Effective && (!o.omega_L || !o.omega_R))
      fail("effective", "omega_L and omega_R are required for a beta sweep");
  } else if (name == "delta") {
    o.delta = value;
  } else if (name == "Delta") {
    o.Delta = value;
  } else {
    fail("sweep.parameters." + name, "not a sweepable parameter");
  }
  return o;
}

}  // namespace leakycav::cli
