#include "coupling.hpp"

#include <cmath>

namespace ionweave {

double frequency_gradient(const QubitSpec& qubit, const MagneticField& field) {
  field.validate();
  require(std::isfinite(qubit.gradient_factor), Errc::invalid_argument,
          "gradient factor must be finite");
  return qubit.gradient_factor * mu_bohr * field.gradient / hbar;
}

CouplingMatrix coupling_matrix(const NormalModes& modes,
                               const std::vector<double>& eps,
                               std::string provenance) {
  const int n = static_cast<int>(modes.mode_matrix.rows());
  require(static_cast<int>(eps.size()) == n, Errc::invalid_argument,
          "one frequency slope per ion required");
  for (double nu : modes.frequencies)
    require(nu > 0, Errc::unstable, "non-positive mode frequency");

  // (A^-1)_nm = sum_j D_jn D_jm / (m nu_j^2), with mode vectors in rows.
  Eigen::MatrixXd jmat = Eigen::MatrixXd::Zero(n, n);
  for (int jm = 0; jm < n; ++jm) {
    const double nu = modes.frequencies[static_cast<std::size_t>(jm)];
    const double w = hbar / (2.0 * modes.mass * nu * nu);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        jmat(a, b) += w * eps[static_cast<std::size_t>(a)] *
                      eps[static_cast<std::size_t>(b)] *
                      modes.mode_matrix(jm, a) * modes.mode_matrix(jm, b);
  }
  jmat = 0.5 * (jmat + jmat.transpose()).eval();  // exact symmetry
  jmat.diagonal().setZero();
  return CouplingMatrix{std::move(jmat), std::move(provenance)};
}

CouplingMatrix coupling_matrix(const NormalModes& modes, double eps_uniform,
                               std::string provenance) {
  return coupling_matrix(
      modes,
      std::vector<double>(static_cast<std::size_t>(modes.mode_matrix.rows()),
                          eps_uniform),
      std::move(provenance));
}

CouplingMatrix coupling_for_crystal(const IonCrystal& crystal,
                                    const QubitSpec& qubit,
                                    const MagneticField& field) {
  const NormalModes modes = normal_modes(crystal);
  const double eps = frequency_gradient(qubit, field);
  std::string prov = crystal.potential.describe() + ", b=" +
                     std::to_string(field.gradient) + " T/m, " +
                     crystal.species.name;
  return coupling_matrix(modes, eps, std::move(prov));
}

PhaseMatrix phase_matrix(const CouplingMatrix& j, double duration) {
  require(duration >= 0, Errc::invalid_argument,
          "evolution duration must be non-negative");
  return PhaseMatrix{0.5 * duration * j.j};
}

double periodicity_residual(const PhaseMatrix& theta, const GraphSpec& graph) {
  const int n = static_cast<int>(theta.theta.rows());
  require(n == graph.n, Errc::invalid_argument,
          "phase matrix and graph dimensions differ");
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double target = graph.has_edge(i, j) ? pi / 4.0 : 0.0;
      const double d = std::remainder(theta.theta(i, j) - target, two_pi);
      sum += d * d;
    }
  return sum;
}

}  // namespace ionweave
