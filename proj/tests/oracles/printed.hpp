#pragma once

// Straight transcriptions of the closed forms, no rearrangement. Only
// usable where nothing cancels or overflows.

#include <array>
#include <cmath>

namespace oracle {

inline std::array<double, 5> master_f(double xi, double chi, double N, double t) {
  const double C = std::cosh(2 * xi * t), S = std::sinh(2 * xi * t);
  const double k = chi * chi / (2 * xi);
  return {k * S * (C * (2 * N + 1) - N - 1), k * S * (C * (2 * N + 1) - N),
          k * (C * C + S * S - C) * (2 * N + 1), k * ((C * C + S * S - C) * N + C * C - C),
          k * ((C * C + S * S - C) * N + S * S)};
}

// Power series for cosh and sinh, summed until the terms vanish.
inline void cosh_sinh_series(double x, double& c, double& s) {
  c = 0.0;
  s = 0.0;
  double term = 1.0;
  for (int k = 0; k < 200; ++k) {
    if (k % 2 == 0) c += term; else s += term;
    term *= x / (k + 1);
    if (std::abs(term) < 1e-300) break;
  }
}

inline std::array<double, 5> master_f_series(double xi, double chi, double N, double t) {
  double C, S;
  cosh_sinh_series(2 * xi * t, C, S);
  const double k = chi * chi / (2 * xi);
  return {k * S * (C * (2 * N + 1) - N - 1), k * S * (C * (2 * N + 1) - N),
          k * (C * C + S * S - C) * (2 * N + 1), k * ((C * C + S * S - C) * N + C * C - C),
          k * ((C * C + S * S - C) * N + S * S)};
}

inline double quad_left(double xi, double chi, double T, double NL, double NR) {
  const double C = std::cosh(2 * xi * T), S = std::sinh(2 * xi * T), S2 = std::sinh(4 * xi * T);
  const double k = chi * chi / (4 * xi * xi);
  return S * S + (1 + 2 * S * S) * NL + k * (3 * C * C - 2 * C - 1 - 2 * xi * T * S2) +
         k * (4 * C * C - 2 * C - 2 - 4 * xi * T * S2) * NL + k * (2 * C * C - 2 * C) * NR;
}

inline double quad_right_printed(double xi, double chi, double T, double NL, double NR) {
  const double C = std::cosh(2 * xi * T);
  const double k = chi * chi / (4 * xi * xi);
  return NR + k * (2 * C * C - 2 * C + 1) + k * (2 * C * C - 2 * C) * NL + k * (-2 * C + 2) * NR;
}

// Harmonic oscillator in a bath with damping 2 chi^2 t: d<N>/dt = 2 chi^2 t (N_R - <N>).
inline double thermal_bath_number(double chi, double T, double NL, double NR) {
  return NR + (NL - NR) * std::exp(-chi * chi * T * T);
}

}  // namespace oracle
