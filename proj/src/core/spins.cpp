#include "spins.hpp"

#include <bit>
#include <cmath>

#include "units.hpp"

namespace ionweave {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

std::size_t insert_bit(std::size_t y, int k, std::size_t bit) {
  const std::size_t low = y & ((std::size_t{1} << k) - 1);
  const std::size_t high = y >> k;
  return low | (bit << k) | (high << (k + 1));
}

}  // namespace

void QuantumState::check_index(int k) const {
  require(k >= 0 && k < n_, Errc::invalid_argument, "qubit index out of range");
}

QuantumState QuantumState::plus_state(int n) {
  require(n >= 1, Errc::invalid_argument, "need at least one qubit");
  require(n <= max_qubits, Errc::capacity,
          "qubit count exceeds the dense-state cap");
  const std::size_t dim = std::size_t{1} << n;
  const double a = std::pow(2.0, -0.5 * n);
  return QuantumState(n, std::vector<std::complex<double>>(dim, {a, 0.0}));
}

QuantumState QuantumState::computational_state(int n, std::size_t bits) {
  require(n >= 1, Errc::invalid_argument, "need at least one qubit");
  require(n <= max_qubits, Errc::capacity,
          "qubit count exceeds the dense-state cap");
  const std::size_t dim = std::size_t{1} << n;
  require(bits < dim, Errc::invalid_argument, "basis index out of range");
  std::vector<std::complex<double>> amp(dim, {0.0, 0.0});
  amp[bits] = 1.0;
  return QuantumState(n, std::move(amp));
}

QuantumState QuantumState::graph_state(const GraphSpec& graph) {
  QuantumState s = plus_state(graph.n);
  for (const auto& [a, b] : graph.edges) s.apply_cz(a, b);
  return s;
}

void QuantumState::apply_phase_evolution(const Eigen::MatrixXd& theta) {
  require(theta.rows() == n_ && theta.cols() == n_, Errc::invalid_argument,
          "phase matrix dimension mismatch");
  const std::size_t dim = amp_.size();
  for (std::size_t x = 0; x < dim; ++x) {
    double phase = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double si = (x >> i) & 1 ? -1.0 : 1.0;
      for (int j = i + 1; j < n_; ++j) {
        const double sj = (x >> j) & 1 ? -1.0 : 1.0;
        phase += theta(i, j) * si * sj;
      }
    }
    amp_[x] *= std::exp(kI * phase);
  }
}

void QuantumState::apply_pauli_x(int k) {
  check_index(k);
  const std::size_t mask = std::size_t{1} << k;
  for (std::size_t x = 0; x < amp_.size(); ++x)
    if (!(x & mask)) std::swap(amp_[x], amp_[x | mask]);
}

void QuantumState::apply_local_z_rotation(int k, double angle) {
  check_index(k);
  const std::complex<double> up = std::exp(kI * angle);    // s = +1
  const std::complex<double> down = std::exp(-kI * angle); // s = -1
  const std::size_t mask = std::size_t{1} << k;
  for (std::size_t x = 0; x < amp_.size(); ++x)
    amp_[x] *= (x & mask) ? down : up;
}

void QuantumState::apply_hadamard(int k) {
  check_index(k);
  const double r = 1.0 / std::numbers::sqrt2;
  const std::size_t mask = std::size_t{1} << k;
  for (std::size_t x = 0; x < amp_.size(); ++x)
    if (!(x & mask)) {
      const auto a0 = amp_[x], a1 = amp_[x | mask];
      amp_[x] = r * (a0 + a1);
      amp_[x | mask] = r * (a0 - a1);
    }
}

void QuantumState::apply_cz(int a, int b) {
  check_index(a);
  check_index(b);
  require(a != b, Errc::invalid_argument, "CZ needs two distinct qubits");
  const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
  for (std::size_t x = 0; x < amp_.size(); ++x)
    if ((x & mask) == mask) amp_[x] = -amp_[x];
}

std::vector<double> QuantumState::stabilizer_expectations(
    const GraphSpec& graph) const {
  require(graph.n == n_, Errc::invalid_argument,
          "graph dimension mismatch");
  std::vector<double> out(static_cast<std::size_t>(n_));
  for (int a = 0; a < n_; ++a) {
    std::size_t zmask = 0;
    for (int b : graph.neighbors(a)) zmask |= std::size_t{1} << b;
    const std::size_t xmask = std::size_t{1} << a;
    std::complex<double> e = 0.0;
    for (std::size_t x = 0; x < amp_.size(); ++x) {
      const double zsign =
          std::popcount(x & zmask) % 2 == 0 ? 1.0 : -1.0;
      e += std::conj(amp_[x]) * zsign * amp_[x ^ xmask];
    }
    out[static_cast<std::size_t>(a)] = e.real();
  }
  return out;
}

double QuantumState::fidelity(const QuantumState& other) const {
  require(other.n_ == n_, Errc::invalid_argument, "state dimension mismatch");
  std::complex<double> inner = 0.0;
  for (std::size_t x = 0; x < amp_.size(); ++x)
    inner += std::conj(amp_[x]) * other.amp_[x];
  return std::norm(inner);
}

double QuantumState::norm() const {
  double s = 0.0;
  for (const auto& a : amp_) s += std::norm(a);
  return std::sqrt(s);
}

void QuantumState::renormalize() {
  const double nn = norm();
  require(nn > 1e-150, Errc::invalid_argument,
          "cannot renormalize a null state");
  for (auto& a : amp_) a /= nn;
}

int QuantumState::measure_qubit(int k, const MeasurementBasis& basis,
                                Rng& rng) {
  check_index(k);
  const std::size_t mask = std::size_t{1} << k;

  if (basis.kind == MeasurementBasis::Kind::z) {
    double p_plus = 0.0;  // Z = +1 means bit k clear
    for (std::size_t x = 0; x < amp_.size(); ++x)
      if (!(x & mask)) p_plus += std::norm(amp_[x]);
    const int outcome = rng.uniform() < p_plus ? +1 : -1;
    for (std::size_t x = 0; x < amp_.size(); ++x) {
      const bool keep = ((x & mask) == 0) == (outcome == +1);
      if (!keep) amp_[x] = 0.0;
    }
    renormalize();
    return outcome;
  }

  // Equatorial basis |+-alpha> = (|0> +- e^{i alpha}|1>)/sqrt(2).
  const std::complex<double> ph = std::exp(kI * basis.angle);
  const double r = 1.0 / std::numbers::sqrt2;
  double p_plus = 0.0;
  for (std::size_t x = 0; x < amp_.size(); ++x)
    if (!(x & mask))
      p_plus += std::norm(r * (amp_[x] + std::conj(ph) * amp_[x | mask]));
  const int outcome = rng.uniform() < p_plus ? +1 : -1;
  const double sgn = outcome;
  for (std::size_t x = 0; x < amp_.size(); ++x)
    if (!(x & mask)) {
      const auto proj = r * (amp_[x] + sgn * std::conj(ph) * amp_[x | mask]);
      amp_[x] = r * proj;
      amp_[x | mask] = sgn * ph * r * proj;
    }
  renormalize();
  return outcome;
}

QuantumState QuantumState::drop_measured_qubit(int k,
                                               const MeasurementBasis& basis,
                                               int outcome) const {
  check_index(k);
  require(n_ >= 2, Errc::invalid_argument,
          "cannot drop the last remaining qubit");
  require(outcome == 1 || outcome == -1, Errc::invalid_argument,
          "outcome must be +-1");
  // Project onto the collapsed single-qubit state and delete the tensor slot.
  std::complex<double> u0, u1;
  if (basis.kind == MeasurementBasis::Kind::z) {
    u0 = outcome == +1 ? 1.0 : 0.0;
    u1 = outcome == +1 ? 0.0 : 1.0;
  } else {
    const double r = 1.0 / std::numbers::sqrt2;
    u0 = r;
    u1 = static_cast<double>(outcome) * r * std::exp(kI * basis.angle);
  }
  const std::size_t dim = amp_.size() >> 1;
  std::vector<std::complex<double>> out(dim);
  for (std::size_t y = 0; y < dim; ++y)
    out[y] = std::conj(u0) * amp_[insert_bit(y, k, 0)] +
             std::conj(u1) * amp_[insert_bit(y, k, 1)];
  QuantumState s(n_ - 1, std::move(out));
  require(s.norm() > 1e-6, Errc::invalid_argument,
          "qubit is not in the stated post-measurement state");
  s.renormalize();
  return s;
}

}  // namespace ionweave
