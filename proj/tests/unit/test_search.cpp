#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/search.hpp"
#include "core/units.hpp"
#include "test_helpers.hpp"

using namespace ionweave;

namespace {

PeriodicSearchProblem two_ion_problem() {
  PeriodicSearchProblem p;
  p.graph = GraphSpec::make(2, {{0, 1}});
  p.well_frequency = {{hz_to_rad(80e3), hz_to_rad(120e3)},
                      {hz_to_rad(80e3), hz_to_rad(120e3)}};
  p.global_frequency = {hz_to_rad(40e3), hz_to_rad(60e3)};
  p.spacing = {16e-6, 24e-6};
  p.gradient = 150.0;
  p.species = yb171();
  p.symmetry_groups = {{0, 1}};
  p.k_max = 4;
  return p;
}

PeriodicSearchProblem triangle_problem() {
  PeriodicSearchProblem p;
  p.graph = GraphSpec::make(3, {{0, 1}, {1, 2}, {0, 2}});
  p.well_frequency = {{hz_to_rad(221600.0), hz_to_rad(332400.0)},
                      {hz_to_rad(80000.0), hz_to_rad(120000.0)},
                      {hz_to_rad(221600.0), hz_to_rad(332400.0)}};
  p.global_frequency = {hz_to_rad(80000.0), hz_to_rad(120000.0)};
  p.spacing = {16e-6, 24e-6};
  p.gradient = 150.0;
  p.species = yb171();
  p.symmetry_groups = {{0, 2}};
  p.k_max = 4;
  p.incumbent = std::vector<double>{hz_to_rad(277000.0), hz_to_rad(100000.0),
                                    hz_to_rad(277000.0), hz_to_rad(100000.0),
                                    20e-6};
  return p;
}

}  // namespace

TEST_CASE("problem validation rejects malformed inputs") {
  PeriodicSearchProblem p = two_ion_problem();
  p.validate();
  CHECK(p.dim() == 4);

  PeriodicSearchProblem mismatch = two_ion_problem();
  mismatch.well_frequency.pop_back();
  expect_error(Errc::invalid_argument, [&] { mismatch.validate(); });

  PeriodicSearchProblem inverted = two_ion_problem();
  inverted.spacing = {24e-6, 16e-6};
  expect_error(Errc::invalid_argument, [&] { inverted.validate(); });

  PeriodicSearchProblem winding = two_ion_problem();
  winding.k_max = -1;
  expect_error(Errc::invalid_argument, [&] { winding.validate(); });

  PeriodicSearchProblem group = two_ion_problem();
  group.symmetry_groups = {{0, 5}};
  expect_error(Errc::invalid_argument, [&] { group.validate(); });

  PeriodicSearchProblem inc = two_ion_problem();
  inc.incumbent = std::vector<double>{1.0, 2.0};
  expect_error(Errc::invalid_argument, [&] { inc.validate(); });
}

TEST_CASE("candidate evaluation scans durations for the phase condition") {
  const PeriodicSearchProblem p = two_ion_problem();
  // A two-ion single-edge target has no non-edge constraints, so any stable
  // configuration reaches the pi/4 phase exactly at some duration.
  const std::vector<double> params{hz_to_rad(100e3), hz_to_rad(100e3),
                                   hz_to_rad(50e3), 20e-6};
  const CandidateEvaluation ev = evaluate_candidate(p, params);
  CHECK(ev.feasible);
  CHECK(ev.residual < 1e-8);
  CHECK(ev.best_duration > 0.0);
  CHECK(ev.j.j.rows() == 2);
  // The reported duration reproduces the reported residual.
  const double theta = ev.j.j(0, 1) * ev.best_duration / 2.0;
  CHECK(std::pow(std::remainder(theta - pi / 4.0, two_pi), 2) ==
        doctest::Approx(ev.residual).epsilon(1e-6));

  expect_error(Errc::invalid_argument,
               [&] { evaluate_candidate(p, {1.0, 2.0}); });
}

TEST_CASE("the incumbent seeds the search and bounds its residual") {
  const PeriodicSearchProblem p = triangle_problem();
  const CandidateEvaluation inc = evaluate_candidate(p, *p.incumbent);
  CHECK(inc.feasible);
  CHECK(inc.residual < 0.05);

  // With a budget of one, the only evaluation is the incumbent itself.
  const SearchResult single = search(p, 7, 1);
  CHECK(single.evaluations == 1);
  REQUIRE(single.parameters.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(single.parameters[i] == (*p.incumbent)[i]);
  CHECK(single.residual == doctest::Approx(inc.residual).epsilon(1e-12));

  // A longer run never does worse than its seed.
  const SearchResult longer = search(p, 7, 60);
  CHECK(longer.evaluations == 60);
  CHECK(longer.residual <= inc.residual);
  CHECK(longer.feasible);

  expect_error(Errc::invalid_argument, [&] { search(p, 7, 0); });
}

TEST_CASE("search is bitwise deterministic for a given seed") {
  const PeriodicSearchProblem p = triangle_problem();
  const SearchResult a = search(p, 42, 40);
  const SearchResult b = search(p, 42, 40);
  CHECK(a.evaluations == b.evaluations);
  CHECK(a.residual == b.residual);
  CHECK(a.best_duration == b.best_duration);
  REQUIRE(a.parameters.size() == b.parameters.size());
  for (std::size_t i = 0; i < a.parameters.size(); ++i)
    CHECK(a.parameters[i] == b.parameters[i]);
}

TEST_CASE("symmetry groups pin tied parameters exactly") {
  PeriodicSearchProblem p = triangle_problem();
  p.incumbent.reset();
  const SearchResult r = search(p, 3, 50);
  CHECK(r.evaluations == 50);
  REQUIRE(r.parameters.size() == 5);
  CHECK(r.parameters[0] == r.parameters[2]);
  // Results respect the search box.
  CHECK(r.parameters[0] >= p.well_frequency[0].lo);
  CHECK(r.parameters[0] <= p.well_frequency[0].hi);
  CHECK(r.parameters[4] >= p.spacing.lo);
  CHECK(r.parameters[4] <= p.spacing.hi);
}
