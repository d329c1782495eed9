#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "coupling.hpp"
#include "graph.hpp"

// Derivative-free search for trap parameters whose coupling matrix satisfies
// the cluster periodicity condition (edge phases pi/4 mod 2pi, non-edge
// phases 0 mod 2pi) at some evolution duration. The landscape is highly
// non-linear in the trap parameters, so a seeded differential-evolution
// search over a bounded box is used; a documented incumbent parameter set
// can be injected as the first population member.

namespace ionweave {

struct ParamBounds {
  double lo = 0.0, hi = 0.0;
};

struct PeriodicSearchProblem {
  GraphSpec graph;
  std::vector<ParamBounds> well_frequency;  // rad/s, one per ion/well
  ParamBounds global_frequency;             // rad/s
  ParamBounds spacing;                      // m, between adjacent well centers
  double gradient = 0.0;                    // T/m
  IonSpecies species;
  double gradient_factor = 1.0;
  // Each group lists well indices forced to share one frequency value.
  std::vector<std::vector<int>> symmetry_groups;
  int k_max = 4;  // winding cap: phases up to 2 pi (k_max+1) are scanned
  // Optional incumbent [w_0..w_{n-1}, global, spacing] (rad/s, rad/s, m).
  std::optional<std::vector<double>> incumbent;

  void validate() const;
  std::size_t dim() const { return well_frequency.size() + 2; }
};

// Penalty residual reported for parameter sets with no stable crystal.
inline constexpr double infeasible_penalty = 1e3;  // rad^2

struct CandidateEvaluation {
  double residual = infeasible_penalty;  // rad^2
  double best_duration = 0.0;            // s
  CouplingMatrix j;
  bool feasible = false;
};

// Build the superposed potential for `params`, solve the crystal, compute J,
// then scan the evolution duration on [0, T_max] (grid + golden-section
// refinement) for the minimum periodicity residual.
CandidateEvaluation evaluate_candidate(const PeriodicSearchProblem& problem,
                                       const std::vector<double>& params);

struct SearchResult {
  std::vector<double> parameters;
  double best_duration = 0.0;
  double residual = infeasible_penalty;
  CouplingMatrix j;
  int evaluations = 0;
  bool feasible = false;
};

// Differential evolution (rand/1/bin, elitist selection), deterministic for
// a given (seed, budget). Symmetry groups are enforced on every candidate.
SearchResult search(const PeriodicSearchProblem& problem, std::uint64_t seed,
                    int budget);

}  // namespace ionweave
