#pragma once

#include <cmath>
#include <numbers>
#include <string>

// Physical constants (CODATA 2018) and unit helpers. All internal quantities
// are SI with angular frequencies in rad/s; user-facing I/O uses ordinary Hz
// and is converted at the boundary.

namespace ionweave {

inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double mu_bohr = 9.2740100783e-24;    // J/T
inline constexpr double elem_charge = 1.602176634e-19; // C
inline constexpr double eps0 = 8.8541878128e-12;       // F/m
inline constexpr double amu = 1.66053906660e-27;       // kg
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double pi = std::numbers::pi;

// Coulomb pair coefficient e^2 / (4 pi eps0): energy = coeff / distance.
inline constexpr double coulomb_coeff =
    elem_charge * elem_charge / (4.0 * std::numbers::pi * eps0);

inline constexpr double hz_to_rad(double f_hz) { return two_pi * f_hz; }
inline constexpr double rad_to_hz(double w) { return w / two_pi; }

struct IonSpecies {
  std::string name;
  double mass = 0.0;               // kg
  double charge = elem_charge;     // C
};

// 171Yb+ (atomic mass 170.936330 u), the workhorse species for
// magnetic-gradient spin-spin coupling experiments.
inline IonSpecies yb171() {
  return IonSpecies{"Yb171", 170.936330 * amu, elem_charge};
}

}  // namespace ionweave
