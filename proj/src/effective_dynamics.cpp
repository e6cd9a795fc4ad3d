#include "leakycav/effective_dynamics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "leakycav/errors.hpp"

namespace leakycav {

std::vector<std::string> drive_warnings(const DriveConfig& drive, double omega_L) {
  std::vector<std::string> out;
  if (drive.epsilon > 1e-2) {
    std::ostringstream s;
    s << "epsilon = " << drive.epsilon << " is not small; RWA terms of order epsilon^2 ignored";
    out.push_back(s.str());
  }
  const double omega = drive.omega > 0.0 ? drive.omega : 2.0 * omega_L;
  if (drive.duration > 0.0 && omega * drive.duration < 1e2) {
    std::ostringstream s;
    s << "omega T = " << omega * drive.duration << " < 100; rotating wave approximation is poor";
    out.push_back(s.str());
  }
  return out;
}

double squeezing_parameter(double epsilon, double omega_L, double omega_Lx) {
  const double ratio = omega_Lx / omega_L;
  return 0.25 * epsilon * omega_L * ratio * ratio;
}

double squeezing_parameter(const CavityConfig& cav, const DriveConfig& drive) {
  const Mode L = fundamental_mode(cav);
  return squeezing_parameter(drive.epsilon, L.omega_total, L.omega_x);
}

double velocity_parameter(double epsilon, double omega_L, double omega_R, double left_length,
                          double m_LR) {
  const double q = std::sqrt(omega_R / omega_L);
  return 0.25 * epsilon * omega_L * (q + 1.0 / q) * left_length * m_LR;
}

double velocity_parameter(const CavityConfig& cav, const DriveConfig& drive,
                          const Mode& right_mode) {
  const Mode L = fundamental_mode(cav);
  const double m = geometry_factor(cav, L, right_mode);
  return velocity_parameter(drive.epsilon, L.omega_total, right_mode.omega_total,
                            cav.left_length(), m);
}

double thermal_occupation(double beta, double omega) {
  if (!(omega > 0.0)) throw ValidationError("thermal_occupation: omega must be positive");
  if (!(beta > 0.0)) throw ValidationError("thermal_occupation: beta must be positive");
  if (std::isinf(beta)) return 0.0;
  const double x = beta * omega;
  if (x > 700.0) return 0.0;
  return 1.0 / std::expm1(x);
}

ThermalState thermal_state(double beta, double omega_L, double omega_R) {
  return {beta, thermal_occupation(beta, omega_L), thermal_occupation(beta, omega_R)};
}

double default_resonance_tol(const DriveConfig& drive, double omega) {
  if (!(drive.duration > 0.0) || !(omega > 0.0)) return 1e-6;
  return 1.0 / (omega * drive.duration);
}

ResonanceReport resonance_report(const CavityConfig& cav, const DriveConfig& drive, double tol,
                                 double frequency_cap) {
  constexpr double pi = std::numbers::pi;
  ResonanceReport rep;
  rep.left = fundamental_mode(cav);
  const double wl = rep.left.omega_total;
  rep.omega = drive.omega > 0.0 ? drive.omega : 2.0 * wl;
  rep.delta = rep.omega / (2.0 * wl) - 1.0;
  const double cap = frequency_cap > 0.0 ? frequency_cap : 1.1 * (rep.omega + wl);

  const int kx = static_cast<int>(std::floor(cap * cav.right_length() / pi)) + 1;
  const auto wx = solve_transverse_frequencies(cav, kx, ModeClass::RightDominated);
  const int ky = static_cast<int>(std::floor(cap * cav.dy / pi));
  const int kz = static_cast<int>(std::floor(cap * cav.dz / pi));

  double best = std::numeric_limits<double>::infinity();
  int best_ix = 0;
  for (int iy = 1; iy <= ky; ++iy) {
    for (int iz = 1; iz <= kz; ++iz) {
      const double ty = iy * pi / cav.dy;
      const double tz = iz * pi / cav.dz;
      for (int ix = 1; ix <= kx; ++ix) {
        const double w = std::sqrt(wx[ix - 1] * wx[ix - 1] + ty * ty + tz * tz);
        if (w > cap) break;
        const double diff = (std::abs(w - wl) - rep.omega) / rep.omega;
        const double sum = (w + wl - rep.omega) / rep.omega;
        auto mode = [&] {
          Mode m;
          m.nx = ix;
          m.ny = iy;
          m.nz = iz;
          m.cls = ModeClass::RightDominated;
          m.omega_x = wx[ix - 1];
          m.omega_total = w;
          return m;
        };
        if (std::abs(diff) < tol) rep.flagged.push_back({mode(), false, diff});
        if (std::abs(sum) < tol) rep.flagged.push_back({mode(), true, sum});
        if (iy == 1 && iz == 1 && w > wl && std::abs(diff) < best) {
          best = std::abs(diff);
          best_ix = ix;
        }
      }
    }
  }
  if (best_ix > 0) {
    rep.nearest_partner = make_mode(cav, best_ix, 1, 1, ModeClass::RightDominated);
    if (best < tol) rep.partner = rep.nearest_partner;
    rep.Delta = rep.nearest_partner->omega_total / wl - 3.0;
  }
  return rep;
}

}  // namespace leakycav
