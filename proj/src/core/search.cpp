#include "search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "minimize.hpp"
#include "rng.hpp"
#include "statics.hpp"

namespace ionweave {

void PeriodicSearchProblem::validate() const {
  require(graph.n >= 2, Errc::invalid_argument, "graph needs at least 2 ions");
  require(static_cast<int>(well_frequency.size()) == graph.n,
          Errc::invalid_argument, "one well-frequency bound per ion required");
  const auto check = [](const ParamBounds& b, const char* what) {
    require(b.lo > 0 && b.hi >= b.lo, Errc::invalid_argument,
            std::string("bounds must satisfy 0 < lo <= hi for ") + what);
  };
  for (const auto& b : well_frequency) check(b, "well frequency");
  check(global_frequency, "global frequency");
  check(spacing, "spacing");
  require(species.mass > 0, Errc::invalid_argument, "species mass required");
  require(k_max >= 0, Errc::invalid_argument, "winding cap must be >= 0");
  for (const auto& group : symmetry_groups)
    for (int idx : group)
      require(idx >= 0 && idx < graph.n, Errc::invalid_argument,
              "symmetry group index out of range");
  if (incumbent)
    require(incumbent->size() == dim(), Errc::invalid_argument,
            "incumbent has the wrong parameter count");
}

namespace {

AxialPotential candidate_potential(const PeriodicSearchProblem& problem,
                                   const std::vector<double>& params) {
  const int n = problem.graph.n;
  const double spacing = params[static_cast<std::size_t>(n) + 1];
  IndividualWells wells;
  const double mid = 0.5 * (n - 1);
  for (int i = 0; i < n; ++i)
    wells.wells.push_back(
        {(i - mid) * spacing, params[static_cast<std::size_t>(i)]});
  Superposed sup;
  sup.parts.emplace_back(wells);
  sup.parts.emplace_back(
      GlobalHarmonic{params[static_cast<std::size_t>(n)], 0.0});
  return AxialPotential{std::move(sup)};
}

struct PairTerm {
  double half_j;   // J_ij / 2, the phase accumulation rate
  double target;   // pi/4 on edges, 0 otherwise
};

double scan_residual(const std::vector<PairTerm>& terms, double t) {
  double sum = 0.0;
  for (const auto& p : terms) {
    const double d = std::remainder(p.half_j * t - p.target, two_pi);
    sum += d * d;
  }
  return sum;
}

}  // namespace

CandidateEvaluation evaluate_candidate(const PeriodicSearchProblem& problem,
                                       const std::vector<double>& params) {
  problem.validate();
  require(params.size() == problem.dim(), Errc::invalid_argument,
          "parameter vector has the wrong size");

  CandidateEvaluation out;
  CouplingMatrix j;
  try {
    const AxialPotential pot = candidate_potential(problem, params);
    const int n = problem.graph.n;
    const double spacing = params[static_cast<std::size_t>(n) + 1];
    std::vector<double> guess(static_cast<std::size_t>(n));
    const double mid = 0.5 * (n - 1);
    for (int i = 0; i < n; ++i)
      guess[static_cast<std::size_t>(i)] = (i - mid) * spacing;
    const IonCrystal crystal =
        solve_equilibrium(pot, problem.species, n, guess);
    const QubitSpec qubit{problem.species, problem.gradient_factor};
    const MagneticField field{0.0, problem.gradient};
    j = coupling_for_crystal(crystal, qubit, field);
  } catch (const Error&) {
    return out;  // penalty residual, flagged infeasible
  }

  // Duration scan bounded by the winding cap on the slowest edge coupling.
  const int n = problem.graph.n;
  std::vector<PairTerm> terms;
  double j_edge_min = std::numeric_limits<double>::infinity();
  double j_abs_max = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const bool edge = problem.graph.has_edge(a, b);
      terms.push_back({0.5 * j.j(a, b), edge ? pi / 4.0 : 0.0});
      if (edge) j_edge_min = std::min(j_edge_min, std::abs(j.j(a, b)));
      j_abs_max = std::max(j_abs_max, std::abs(j.j(a, b)));
    }
  if (!(j_edge_min > 0) || !std::isfinite(j_edge_min)) return out;

  const double t_max =
      4.0 * pi * (problem.k_max + 1) / j_edge_min;
  const std::size_t grid = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(t_max * j_abs_max * 8.0 / pi)),
      2000, std::size_t{1} << 20);

  double best_t = 0.0;
  double best_r = scan_residual(terms, 0.0);
  for (std::size_t k = 1; k <= grid; ++k) {
    const double t = t_max * static_cast<double>(k) / static_cast<double>(grid);
    const double r = scan_residual(terms, t);
    if (r < best_r) {
      best_r = r;
      best_t = t;
    }
  }
  const double dt = t_max / static_cast<double>(grid);
  const double lo = std::max(0.0, best_t - dt), hi = std::min(t_max, best_t + dt);
  const double t_ref = golden_section_min(
      [&](double t) { return scan_residual(terms, t); }, lo, hi,
      std::max(1e-15, t_max * 1e-12));
  const double r_ref = scan_residual(terms, t_ref);

  out.feasible = true;
  out.j = std::move(j);
  if (r_ref <= best_r) {
    out.residual = r_ref;
    out.best_duration = t_ref;
  } else {
    out.residual = best_r;
    out.best_duration = best_t;
  }
  return out;
}

namespace {

void apply_symmetry(const PeriodicSearchProblem& problem,
                    std::vector<double>* params) {
  for (const auto& group : problem.symmetry_groups) {
    if (group.empty()) continue;
    const double v = (*params)[static_cast<std::size_t>(group.front())];
    for (int idx : group) (*params)[static_cast<std::size_t>(idx)] = v;
  }
}

std::vector<ParamBounds> flat_bounds(const PeriodicSearchProblem& problem) {
  std::vector<ParamBounds> b = problem.well_frequency;
  b.push_back(problem.global_frequency);
  b.push_back(problem.spacing);
  return b;
}

void clamp_to_bounds(const std::vector<ParamBounds>& bounds,
                     std::vector<double>* params) {
  for (std::size_t i = 0; i < params->size(); ++i)
    (*params)[i] = std::clamp((*params)[i], bounds[i].lo, bounds[i].hi);
}

}  // namespace

SearchResult search(const PeriodicSearchProblem& problem, std::uint64_t seed,
                    int budget) {
  problem.validate();
  require(budget >= 1, Errc::invalid_argument, "budget must be >= 1");

  const auto bounds = flat_bounds(problem);
  const std::size_t dim = problem.dim();
  const std::size_t pop = std::max<std::size_t>(8, std::min<std::size_t>(24, 4 * dim));
  constexpr double f_weight = 0.7, crossover = 0.9;

  Rng rng(seed);
  std::vector<std::vector<double>> members(pop);
  std::vector<double> residuals(pop,
                                std::numeric_limits<double>::infinity());
  std::vector<CandidateEvaluation> evals(pop);

  SearchResult best;
  best.j.j = Eigen::MatrixXd::Zero(problem.graph.n, problem.graph.n);
  int used = 0;

  const auto consider = [&](const std::vector<double>& p,
                            const CandidateEvaluation& e) {
    if (e.residual < best.residual ||
        (best.parameters.empty() && used == 1)) {
      best.parameters = p;
      best.residual = e.residual;
      best.best_duration = e.best_duration;
      best.feasible = e.feasible;
      if (e.feasible) best.j = e.j;
    }
  };

  // Initial population: the incumbent (if any) first, then uniform samples.
  for (std::size_t i = 0; i < pop; ++i) {
    std::vector<double> p(dim);
    if (i == 0 && problem.incumbent) {
      p = *problem.incumbent;
    } else {
      for (std::size_t d = 0; d < dim; ++d)
        p[d] = rng.uniform(bounds[d].lo, bounds[d].hi);
    }
    clamp_to_bounds(bounds, &p);
    apply_symmetry(problem, &p);
    members[i] = std::move(p);
    if (used < budget) {
      evals[i] = evaluate_candidate(problem, members[i]);
      residuals[i] = evals[i].residual;
      ++used;
      consider(members[i], evals[i]);
    }
  }

  // DE generations (rand/1/bin) with greedy selection.
  while (used < budget) {
    for (std::size_t i = 0; i < pop && used < budget; ++i) {
      std::size_t r1, r2, r3;
      do r1 = rng.below(pop); while (r1 == i);
      do r2 = rng.below(pop); while (r2 == i || r2 == r1);
      do r3 = rng.below(pop); while (r3 == i || r3 == r1 || r3 == r2);
      std::vector<double> trial = members[i];
      const std::size_t forced = rng.below(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        if (d == forced || rng.uniform() < crossover)
          trial[d] = members[r1][d] +
                     f_weight * (members[r2][d] - members[r3][d]);
      }
      clamp_to_bounds(bounds, &trial);
      apply_symmetry(problem, &trial);
      const CandidateEvaluation e = evaluate_candidate(problem, trial);
      ++used;
      consider(trial, e);
      if (e.residual <= residuals[i]) {
        members[i] = std::move(trial);
        residuals[i] = e.residual;
        evals[i] = e;
      }
    }
  }

  best.evaluations = used;
  return best;
}

}  // namespace ionweave
