#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "potential.hpp"
#include "units.hpp"

// Ion-crystal statics: equilibrium positions under trap + Coulomb forces,
// the stiffness (Hessian) matrix about equilibrium, and its normal modes.

namespace ionweave {

struct IonCrystal {
  IonSpecies species;
  AxialPotential potential;
  std::vector<double> positions;   // m, strictly increasing
  double gradient_norm = 0.0;      // J/m, residual at the returned positions
};

struct NormalModes {
  std::vector<double> frequencies;  // rad/s, ascending
  Eigen::MatrixXd mode_matrix;      // rows are unit-norm mode vectors
  Eigen::MatrixXd hessian;          // J/m^2
  double mass = 0.0;                // kg
};

// Total potential energy (trap + pairwise Coulomb) of an ion configuration.
double total_energy(const AxialPotential& pot, const IonSpecies& species,
                    const std::vector<double>& z);

// Damped-Newton energy minimization. Without an explicit guess the initial
// configuration is equal spacing over 2*l*N^0.56 for a single global well
// (l the two-ion length scale) or the well centers for multi-well models.
IonCrystal solve_equilibrium(
    const AxialPotential& pot, const IonSpecies& species, int n,
    const std::optional<std::vector<double>>& initial_guess = std::nullopt);

// Stiffness matrix about equilibrium:
//   A_nn = U''(z_n) + sum_{m != n} 2 C / d_nm^3,   A_nm = -2 C / d_nm^3
// with C = e^2/(4 pi eps0).
Eigen::MatrixXd hessian(const IonCrystal& crystal);

// Eigen-decomposition of A: frequencies nu_j = sqrt(eig_j / mass) ascending;
// mode rows sign-fixed so each row's largest-magnitude entry is positive.
NormalModes normal_modes(const Eigen::MatrixXd& a, double mass);

inline NormalModes normal_modes(const IonCrystal& crystal) {
  return normal_modes(hessian(crystal), crystal.species.mass);
}

}  // namespace ionweave
