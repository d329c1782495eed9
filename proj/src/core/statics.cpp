#include "statics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"

namespace ionweave {

namespace {

// Collect harmonic-well centers from a potential (recursing through
// superpositions); used to seed multi-well equilibrium solves.
void collect_well_centers(const AxialPotential& pot,
                          std::vector<double>* centers) {
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, IndividualWells>) {
          for (const auto& w : p.wells) centers->push_back(w.center);
        } else if constexpr (std::is_same_v<T, Superposed>) {
          for (const auto& part : p.parts) collect_well_centers(part, centers);
        }
      },
      pot.variant());
}

const GlobalHarmonic* find_global(const AxialPotential& pot) {
  if (const auto* g = std::get_if<GlobalHarmonic>(&pot.variant())) return g;
  if (const auto* sp = std::get_if<Superposed>(&pot.variant())) {
    for (const auto& part : sp->parts)
      if (const auto* g = find_global(part)) return g;
  }
  return nullptr;
}

const SegmentedVoltages* find_segmented(const AxialPotential& pot) {
  if (const auto* s = std::get_if<SegmentedVoltages>(&pot.variant())) return s;
  if (const auto* sp = std::get_if<Superposed>(&pot.variant())) {
    for (const auto& part : sp->parts)
      if (const auto* s = find_segmented(part)) return s;
  }
  return nullptr;
}

std::vector<double> default_guess(const AxialPotential& pot,
                                  const IonSpecies& species, int n) {
  std::vector<double> centers;
  collect_well_centers(pot, &centers);
  if (centers.empty()) {
    if (const auto* seg = find_segmented(pot)) {
      const double span =
          0.5 * seg->geometry.pitch() * seg->geometry.segment_count;
      for (const auto& fit :
           find_wells(pot, species, -span, span, seg->geometry.isolation_gap))
        centers.push_back(fit.center);
    }
  }

  std::vector<double> guess(static_cast<std::size_t>(n));
  if (!centers.empty()) {
    // Distribute ions over wells left to right, as evenly as possible;
    // cohabiting ions are staggered 1 um apart inside their well.
    std::sort(centers.begin(), centers.end());
    const std::size_t w = centers.size();
    const std::size_t base = static_cast<std::size_t>(n) / w;
    const std::size_t extra = static_cast<std::size_t>(n) % w;
    std::size_t ion = 0;
    for (std::size_t i = 0; i < w && ion < guess.size(); ++i) {
      const std::size_t occ = base + (i < extra ? 1 : 0);
      for (std::size_t j = 0; j < occ && ion < guess.size(); ++j, ++ion)
        guess[ion] =
            centers[i] + 1e-6 * (static_cast<double>(j) - 0.5 * (occ - 1));
    }
    return guess;
  }

  // Single global well: equal spacing over 2 l N^0.56 about the center,
  // l the two-ion Coulomb length scale.
  const GlobalHarmonic* g = find_global(pot);
  double nu = g ? g->nu1 : 0.0;
  double center = g ? g->center : 0.0;
  if (!g) {
    const double curv = pot.evaluate(species, 0.0, 2);
    require(curv > 0, Errc::confinement,
            "potential is not confining at the origin and provides no wells");
    nu = std::sqrt(curv / species.mass);
  }
  const double l =
      std::cbrt(coulomb_coeff / (species.mass * nu * nu));
  const double span = 2.0 * l * std::pow(static_cast<double>(n), 0.56);
  for (int i = 0; i < n; ++i)
    guess[static_cast<std::size_t>(i)] =
        center + (n == 1 ? 0.0
                         : span * (static_cast<double>(i) / (n - 1) - 0.5));
  return guess;
}

Eigen::VectorXd energy_gradient(const AxialPotential& pot,
                                const IonSpecies& species,
                                const std::vector<double>& z) {
  const int n = static_cast<int>(z.size());
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i)
    g(i) = pot.evaluate(species, z[static_cast<std::size_t>(i)], 1);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = z[static_cast<std::size_t>(j)] -
                       z[static_cast<std::size_t>(i)];
      const double f = coulomb_coeff / (d * d);
      g(i) += f;   // pushed left by the ion to the right
      g(j) -= f;
    }
  return g;
}

Eigen::MatrixXd stiffness(const AxialPotential& pot, const IonSpecies& species,
                          const std::vector<double>& z) {
  const int n = static_cast<int>(z.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    a(i, i) = pot.evaluate(species, z[static_cast<std::size_t>(i)], 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = std::abs(z[static_cast<std::size_t>(j)] -
                                z[static_cast<std::size_t>(i)]);
      require(d > 1e-9, Errc::singular, "coincident ions in stiffness matrix");
      const double k = 2.0 * coulomb_coeff / (d * d * d);
      a(i, i) += k;
      a(j, j) += k;
      a(i, j) -= k;
      a(j, i) -= k;
    }
  return a;
}

bool strictly_increasing(const std::vector<double>& z) {
  for (std::size_t i = 1; i < z.size(); ++i)
    if (z[i] <= z[i - 1]) return false;
  return true;
}

}  // namespace

double total_energy(const AxialPotential& pot, const IonSpecies& species,
                    const std::vector<double>& z) {
  double e = 0.0;
  for (double zi : z) e += pot.evaluate(species, zi, 0);
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j)
      e += coulomb_coeff / std::abs(z[j] - z[i]);
  return e;
}

IonCrystal solve_equilibrium(
    const AxialPotential& pot, const IonSpecies& species, int n,
    const std::optional<std::vector<double>>& initial_guess) {
  require(n >= 1, Errc::invalid_argument, "ion count must be >= 1");
  require(species.mass > 0 && species.charge > 0, Errc::invalid_argument,
          "species mass and charge must be positive");

  std::vector<double> z;
  if (initial_guess) {
    require(initial_guess->size() == static_cast<std::size_t>(n),
            Errc::invalid_argument, "initial guess size mismatch");
    z = *initial_guess;
    std::sort(z.begin(), z.end());
  } else {
    z = default_guess(pot, species, n);
  }
  require(strictly_increasing(z) || n == 1, Errc::invalid_argument,
          "initial positions must be distinct");

  const double escape_limit = 1.0;  // m; far beyond any trap model's range
  double energy = total_energy(pot, species, z);
  require(std::isfinite(energy), Errc::confinement,
          "non-finite energy at initial configuration");

  // Force tolerance: 1e-9 of the characteristic Coulomb force at the mean
  // spacing (single ion: force at 1 um displacement in the local curvature).
  const auto force_tol = [&](const std::vector<double>& zz) {
    if (n >= 2) {
      const double mean_d = (zz.back() - zz.front()) / (n - 1);
      return 1e-9 * coulomb_coeff / (mean_d * mean_d);
    }
    const double curv = std::abs(pot.evaluate(species, zz[0], 2));
    return 1e-9 * curv * 1e-6;
  };

  const int cap = 500;
  double gnorm = 0.0;
  for (int iter = 0; iter < cap; ++iter) {
    const Eigen::VectorXd g = energy_gradient(pot, species, z);
    gnorm = g.norm();
    if (gnorm < force_tol(z)) {
      IonCrystal out{species, pot, z, gnorm};
      return out;
    }

    // Newton direction; fall back to steepest descent when the local
    // stiffness is not positive definite or yields an ascent direction.
    Eigen::VectorXd step;
    const Eigen::MatrixXd a = stiffness(pot, species, z);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    bool have_newton = ldlt.info() == Eigen::Success && ldlt.isPositive();
    if (have_newton) {
      step = -ldlt.solve(g);
      if (step.dot(g) >= 0) have_newton = false;
    }
    if (!have_newton) {
      const double scale = std::max(a.diagonal().maxCoeff(), 1e-30);
      step = -g / scale;
    }

    // Backtracking line search: demand an energy decrease and preserve the
    // left-to-right ion ordering.
    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt, lambda *= 0.5) {
      std::vector<double> trial(z);
      for (int i = 0; i < n; ++i)
        trial[static_cast<std::size_t>(i)] += lambda * step(i);
      if (n > 1 && !strictly_increasing(trial)) continue;
      if (std::abs(trial.front()) > escape_limit ||
          std::abs(trial.back()) > escape_limit)
        continue;  // overshoot; retry with a shorter step
      double trial_energy;
      try {
        trial_energy = total_energy(pot, species, trial);
      } catch (const Error& e) {
        if (e.code() == Errc::range) continue;  // stepped off a tabulated basis
        throw;
      }
      if (std::isfinite(trial_energy) && trial_energy <= energy) {
        z = std::move(trial);
        energy = trial_energy;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (std::abs(z.front()) > 0.5 * escape_limit ||
          std::abs(z.back()) > 0.5 * escape_limit)
        fail(Errc::confinement, "ions escaped the confining region");
      fail(Errc::convergence,
           "line search stalled; residual gradient " + std::to_string(gnorm));
    }
  }
  fail(Errc::convergence, "no convergence after 500 iterations; residual " +
                              std::to_string(gnorm));
}

Eigen::MatrixXd hessian(const IonCrystal& crystal) {
  return stiffness(crystal.potential, crystal.species, crystal.positions);
}

NormalModes normal_modes(const Eigen::MatrixXd& a, double mass) {
  require(a.rows() == a.cols() && a.rows() >= 1, Errc::invalid_argument,
          "stiffness matrix must be square");
  require(mass > 0, Errc::invalid_argument, "mass must be positive");
  require(a.isApprox(a.transpose(), 1e-12), Errc::invalid_argument,
          "stiffness matrix must be symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  require(es.info() == Eigen::Success, Errc::unstable,
          "eigendecomposition failed");

  NormalModes nm;
  nm.mass = mass;
  nm.hessian = a;
  const int n = static_cast<int>(a.rows());
  nm.frequencies.resize(static_cast<std::size_t>(n));
  nm.mode_matrix.resize(n, n);
  for (int j = 0; j < n; ++j) {
    const double eig = es.eigenvalues()(j);
    require(eig > 0, Errc::unstable,
            "non-positive stiffness eigenvalue: crystal unstable");
    nm.frequencies[static_cast<std::size_t>(j)] = std::sqrt(eig / mass);
    Eigen::VectorXd v = es.eigenvectors().col(j);
    int imax = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
    if (v(imax) < 0) v = -v;
    nm.mode_matrix.row(j) = v.transpose();
  }
  return nm;
}

}  // namespace ionweave
