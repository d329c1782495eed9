#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graph.hpp"
#include "statics.hpp"
#include "units.hpp"

// Magnetic-gradient-induced spin-spin couplings. A static field gradient b
// along the axis makes each qubit's transition frequency position dependent
// (slope eps = g_factor * mu_B * b / hbar); the ions' shared motional modes
// then mediate an Ising-type coupling
//   J_nm = (hbar/2) eps_n eps_m (A^-1)_nm
//        = (hbar / 2 m) sum_j eps_n eps_m D_nj D_mj / nu_j^2 .
// Internally J is rad/s; divide by 2 pi for ordinary-frequency reporting.

namespace ionweave {

struct MagneticField {
  double offset = 0.0;    // T
  double gradient = 0.0;  // T/m

  void validate() const {
    require(std::isfinite(gradient), Errc::invalid_argument,
            "field gradient must be finite");
    require(offset >= 0 && std::isfinite(offset), Errc::invalid_argument,
            "field offset must be finite and non-negative");
  }
};

struct QubitSpec {
  IonSpecies species;
  // Product of Lande factor and magnetic quantum number of the stretched
  // qubit level; 1 for the 171Yb+ |F=1, m_F=1> clock partner.
  double gradient_factor = 1.0;
};

// Frequency-vs-position slope eps in rad s^-1 m^-1.
double frequency_gradient(const QubitSpec& qubit, const MagneticField& field);

struct CouplingMatrix {
  Eigen::MatrixXd j;       // rad/s, symmetric, zero diagonal
  std::string provenance;  // human-readable configuration description
};

// Mode-sum evaluation of J for per-ion slopes eps (rad s^-1 m^-1).
CouplingMatrix coupling_matrix(const NormalModes& modes,
                               const std::vector<double>& eps,
                               std::string provenance = {});
CouplingMatrix coupling_matrix(const NormalModes& modes, double eps_uniform,
                               std::string provenance = {});

// Convenience pipeline: equilibrium -> modes -> J for a uniform qubit spec.
CouplingMatrix coupling_for_crystal(const IonCrystal& crystal,
                                    const QubitSpec& qubit,
                                    const MagneticField& field);

struct PhaseMatrix {
  Eigen::MatrixXd theta;  // rad, symmetric, zero diagonal
};

// Accumulated two-qubit phases for a constant-J window: Theta = J * t / 2.
PhaseMatrix phase_matrix(const CouplingMatrix& j, double duration);

// Sum of squared circle distances between Theta_ij and the target pattern
// (pi/4 mod 2 pi on edges, 0 mod 2 pi on non-edges).
double periodicity_residual(const PhaseMatrix& theta, const GraphSpec& graph);

}  // namespace ionweave
