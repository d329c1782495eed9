#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "graph.hpp"
#include "rng.hpp"

// Dense state-vector simulator for small spin registers. Qubit k is the k-th
// least significant bit of the basis index; bit 0 means Z-eigenvalue +1.
// Global phase is never meaningful here — compare states via fidelity.

namespace ionweave {

struct MeasurementBasis {
  // Z, or an equatorial axis cos(angle) X + sin(angle) Y.
  enum class Kind { z, plane } kind = Kind::z;
  double angle = 0.0;

  static MeasurementBasis x() { return {Kind::plane, 0.0}; }
  static MeasurementBasis y() { return {Kind::plane, 1.5707963267948966}; }
  static MeasurementBasis z() { return {Kind::z, 0.0}; }
  static MeasurementBasis plane(double angle) { return {Kind::plane, angle}; }
};

class QuantumState {
 public:
  static constexpr int max_qubits = 14;

  static QuantumState plus_state(int n);
  static QuantumState computational_state(int n, std::size_t bits);
  static QuantumState graph_state(const GraphSpec& graph);

  int n() const { return n_; }
  const std::vector<std::complex<double>>& amplitudes() const { return amp_; }
  std::vector<std::complex<double>>& amplitudes() { return amp_; }

  // Diagonal two-body evolution: |x> *= exp(i sum_{i<j} theta_ij s_i s_j)
  // with s_k = +-1 the Z eigenvalue of bit k.
  void apply_phase_evolution(const Eigen::MatrixXd& theta);
  void apply_pauli_x(int k);
  // |x> *= exp(i angle s_k).
  void apply_local_z_rotation(int k, double angle);
  void apply_hadamard(int k);
  void apply_cz(int a, int b);

  // <K_a> for K_a = X_a prod_{b in N(a)} Z_b, one entry per vertex.
  std::vector<double> stabilizer_expectations(const GraphSpec& graph) const;

  double fidelity(const QuantumState& other) const;  // |<this|other>|^2
  double norm() const;
  void renormalize();

  // Born-rule projective measurement of qubit k; returns +-1 and collapses
  // (and renormalizes) the state in place, consuming one uniform draw.
  int measure_qubit(int k, const MeasurementBasis& basis, Rng& rng);

  // Remove a qubit known to be in a definite basis state after measurement;
  // n decreases by one and higher qubits shift down.
  QuantumState drop_measured_qubit(int k, const MeasurementBasis& basis,
                                   int outcome) const;

 private:
  QuantumState(int n, std::vector<std::complex<double>> amp)
      : n_(n), amp_(std::move(amp)) {}
  void check_index(int k) const;

  int n_ = 0;
  std::vector<std::complex<double>> amp_;
};

}  // namespace ionweave
