#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "core/coupling.hpp"
#include "core/graph.hpp"
#include "core/statics.hpp"
#include "core/units.hpp"
#include "test_helpers.hpp"

using namespace ionweave;

namespace {

const IonSpecies yb = yb171();
const double nu = hz_to_rad(200e3);
const MagneticField b100{0.0, 100.0};
const QubitSpec qubit{yb, 1.0};

AxialPotential harmonic() { return AxialPotential{GlobalHarmonic{nu}}; }

}  // namespace

TEST_CASE("frequency slope follows the gradient linearly") {
  CHECK(frequency_gradient(qubit, b100) ==
        rel(mu_bohr * 100.0 / hbar, 1e-15));
  const QubitSpec half{yb, 0.5};
  CHECK(frequency_gradient(half, b100) ==
        rel(0.5 * mu_bohr * 100.0 / hbar, 1e-15));
  expect_error(Errc::invalid_argument, [] {
    MagneticField bad{-1.0, 100.0};
    frequency_gradient(qubit, bad);
  });
}

TEST_CASE("two-ion coupling matches the closed form and reference value") {
  const IonCrystal c = solve_equilibrium(harmonic(), yb, 2);
  const CouplingMatrix j = coupling_for_crystal(c, qubit, b100);
  REQUIRE(j.j.rows() == 2);

  // Closed form: J12 = (hbar/2) eps^2 / (3 m nu^2) at the two-ion
  // equilibrium, where the Coulomb stiffness equals the trap stiffness.
  const double eps = frequency_gradient(qubit, b100);
  const double analytic = 0.5 * hbar * eps * eps / (3.0 * yb.mass * nu * nu);
  CHECK(j.j(0, 1) == rel(analytic, 1e-9));
  CHECK(j.j(0, 1) == rel(3032.5258731848621, 1e-9));
  CHECK(j.j(1, 0) == j.j(0, 1));
  CHECK(j.j(0, 0) == 0.0);
  CHECK(j.j(1, 1) == 0.0);
  CHECK(!j.provenance.empty());
  CHECK(j.provenance.find("harmonic") != std::string::npos);
}

TEST_CASE("mode-sum coupling equals the direct stiffness inverse") {
  const IonCrystal c = solve_equilibrium(harmonic(), yb, 4);
  const NormalModes m = normal_modes(c);
  const double eps = frequency_gradient(qubit, b100);
  const CouplingMatrix j = coupling_matrix(m, eps);

  Eigen::MatrixXd direct = 0.5 * hbar * eps * eps * hessian(c).inverse();
  direct.diagonal().setZero();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      CHECK(j.j(a, b) == doctest::Approx(direct(a, b))
                             .epsilon(1e-10)
                             .scale(std::abs(direct.maxCoeff())));
}

TEST_CASE("per-ion slopes scale couplings multiplicatively") {
  const IonCrystal c = solve_equilibrium(harmonic(), yb, 4);
  const NormalModes m = normal_modes(c);
  const double eps = frequency_gradient(qubit, b100);
  const CouplingMatrix uni = coupling_matrix(m, eps);
  const std::vector<double> slopes{eps, 2.0 * eps, 3.0 * eps, 4.0 * eps};
  const CouplingMatrix vec = coupling_matrix(m, slopes);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      const double factor = (a + 1.0) * (b + 1.0);
      CHECK(vec.j(a, b) == rel(factor * uni.j(a, b), 1e-12));
    }
  expect_error(Errc::invalid_argument, [&] {
    coupling_matrix(m, std::vector<double>{eps, eps});
  });
}

TEST_CASE("zero gradient gives exactly zero coupling") {
  const IonCrystal c = solve_equilibrium(harmonic(), yb, 3);
  const MagneticField b0{0.0, 0.0};
  const CouplingMatrix j = coupling_for_crystal(c, qubit, b0);
  CHECK(j.j.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coupling scales as gradient squared and inverse frequency squared") {
  const IonCrystal c = solve_equilibrium(harmonic(), yb, 5);
  const CouplingMatrix j1 = coupling_for_crystal(c, qubit, b100);
  const CouplingMatrix j2 =
      coupling_for_crystal(c, qubit, MagneticField{0.0, 200.0});
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      if (a == b) continue;
      CHECK(j2.j(a, b) == rel(4.0 * j1.j(a, b), 1e-15));
    }

  // Doubling the trap frequency rescales the crystal and quarters J.
  const AxialPotential stiff{GlobalHarmonic{2.0 * nu}};
  const IonCrystal cs = solve_equilibrium(stiff, yb, 5);
  const CouplingMatrix js = coupling_for_crystal(cs, qubit, b100);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      if (a == b) continue;
      CHECK(4.0 * js.j(a, b) == rel(j1.j(a, b), 1e-9));
    }
}

TEST_CASE("four-ion couplings match reference values") {
  const IonCrystal c = solve_equilibrium(harmonic(), yb, 4);
  const CouplingMatrix j = coupling_for_crystal(c, qubit, b100);
  CHECK(j.j(0, 3) == rel(1243.0229567335195, 1e-9));
  CHECK(j.j(0, 1) == rel(2178.3499804680046, 1e-9));
  CHECK(j.j(1, 2) == rel(2083.7571255801154, 1e-9));
}

TEST_CASE("six-well ladder isolates one dominant coupling") {
  // Individual wells at measured inter-well distances; frequencies chosen so
  // one nearest-neighbour pair dominates every other coupling.
  const double dist_um[5] = {320.0, 138.0, 297.0, 266.0, 279.0};
  const double freq_mhz[6] = {1.65, 0.35, 0.27, 1.16, 0.83, 0.98};
  std::vector<double> centers{0.0};
  for (double d : dist_um) centers.push_back(centers.back() + d * 1e-6);
  double mean = 0.0;
  for (double z : centers) mean += z / 6.0;
  IndividualWells wells;
  for (std::size_t i = 0; i < 6; ++i)
    wells.wells.push_back({centers[i] - mean, hz_to_rad(freq_mhz[i] * 1e6)});

  const IonCrystal c = solve_equilibrium(AxialPotential{wells}, yb, 6);
  const CouplingMatrix j = coupling_for_crystal(c, qubit, b100);

  const double ref_nn[5] = {0.0013711483821388507, 0.6379303381717121,
                            0.005830186927550444, 0.0008588424884620328,
                            0.0010428196538085125};
  for (int i = 0; i < 5; ++i) CHECK(j.j(i, i + 1) == rel(ref_nn[i], 1e-9));

  double others = 0.0;
  for (int i = 0; i < 5; ++i)
    if (i != 1) others = std::max(others, std::abs(j.j(i, i + 1)));
  CHECK(j.j(1, 2) / others == rel(109.41850511810928, 1e-9));
  CHECK(j.j(1, 2) > 100.0 * others);
}

TEST_CASE("phase matrix accumulates J t / 2") {
  const IonCrystal c = solve_equilibrium(harmonic(), yb, 3);
  const CouplingMatrix j = coupling_for_crystal(c, qubit, b100);
  const double t = 1.7e-4;
  const PhaseMatrix theta = phase_matrix(j, t);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(theta.theta(a, b) == doctest::Approx(0.5 * t * j.j(a, b))
                                     .epsilon(1e-15)
                                     .scale(std::abs(j.j.maxCoeff() * t)));
  expect_error(Errc::invalid_argument, [&] { phase_matrix(j, -1.0); });
}

TEST_CASE("periodicity residual measures circle distance to the target") {
  const GraphSpec path = GraphSpec::make(3, {{0, 1}, {1, 2}});
  Eigen::MatrixXd th = Eigen::MatrixXd::Zero(3, 3);
  const auto set = [&](int a, int b, double v) {
    th(a, b) = v;
    th(b, a) = v;
  };
  // Edge phases off by whole turns are perfect; the non-edge leaks 0.1 rad.
  set(0, 1, pi / 4.0 + two_pi);
  set(1, 2, pi / 4.0 - 3.0 * two_pi);
  set(0, 2, 0.1);
  CHECK(periodicity_residual(PhaseMatrix{th}, path) == rel(0.01, 1e-9));

  // Worst case: an edge phase half a turn away contributes pi^2.
  const GraphSpec pair = GraphSpec::make(2, {{0, 1}});
  Eigen::MatrixXd th2 = Eigen::MatrixXd::Zero(2, 2);
  th2(0, 1) = th2(1, 0) = pi / 4.0 + pi;
  CHECK(periodicity_residual(PhaseMatrix{th2}, pair) == rel(pi * pi, 1e-12));

  expect_error(Errc::invalid_argument, [&] {
    periodicity_residual(PhaseMatrix{th2}, path);
  });
}
