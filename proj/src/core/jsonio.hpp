#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "coupling.hpp"
#include "potential.hpp"
#include "schedule.hpp"
#include "search.hpp"
#include "spins.hpp"
#include "statics.hpp"

// File-format layer. Conventions for every user-facing file: frequencies in
// ordinary Hz (suffix _hz), lengths in m, durations in s, gradients in T/m,
// angles in rad; coupling matrices are the explicit exception and are labeled
// rad/s. JSON objects keep insertion order so output is byte-stable.

namespace ionweave {

using Json = nlohmann::ordered_json;

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

// Parse with diagnostics; `origin` names the source in error messages.
Json parse_json(const std::string& text, const std::string& origin);
Json load_json_file(const std::filesystem::path& path);

// --- species / field / qubit ---------------------------------------------
// {"name": "...", "mass_amu": … | "mass_kg": …, "charge_e": …}; an absent or
// null object defaults to 171Yb+.
IonSpecies json_to_species(const Json& j);
Json species_to_json(const IonSpecies& s);

// {"gradient_t_per_m": …, "offset_t": …}
MagneticField json_to_field(const Json& j);
Json field_to_json(const MagneticField& f);

// {"gradient_factor": …}; defaults to 1.
QubitSpec json_to_qubit(const Json& j, const IonSpecies& species);

// --- potentials -----------------------------------------------------------
// Tagged by "variant":
//   {"variant":"harmonic",  "nu1_hz": …, "center_m": …}
//   {"variant":"wells",     "wells": [{"center_m": …, "omega_hz": …}, …]}
//   {"variant":"superposed","parts": [<potential>, …]}
//   {"variant":"segmented", "geometry": {…}, "voltages_v": […],
//                           "basis_csv": "path"?}
// `basis_csv` paths are resolved relative to base_dir.
AxialPotential json_to_potential(const Json& j,
                                 const std::filesystem::path& base_dir);

struct ScanSpec {
  double z_min = 0.0;       // m
  double z_max = 0.0;       // m
  double grid_step = 0.0;   // m
  double fit_window = 0.0;  // m, 0 -> library default
};

struct SimulationConfig {
  AxialPotential potential;
  IonSpecies species;
  int ion_count = 0;
  MagneticField field;
  QubitSpec qubit;
  std::optional<ScanSpec> scan;
};

// {"potential": …, "species": …?, "ion_count": …, "field": …?, "qubit": …?,
//  "scan": {"z_min_m","z_max_m","grid_step_m","fit_window_m"?}?}
SimulationConfig json_to_config(const Json& j,
                                const std::filesystem::path& base_dir);

// --- statics / coupling exports ------------------------------------------
Json crystal_to_json(const IonCrystal& crystal);
Json modes_to_json(const IonCrystal& crystal, const NormalModes& modes);
Json wells_to_json(const std::vector<WellFit>& wells);

// CSV: single header line `J_rad_per_s`, then one row per ion.
std::string coupling_to_csv(const CouplingMatrix& j);
Json coupling_to_json(const CouplingMatrix& j, const MagneticField& field,
                      const QubitSpec& qubit);

// --- schedules ------------------------------------------------------------
// {"n_qubits": …, "target_edges": [[a,b],…], "steps": [{"kind": …, …}, …]}
Json schedule_to_json(const PulseSchedule& schedule);
PulseSchedule json_to_schedule(const Json& j);

// {"catalogs": {name: {"wells": [{"center_m": …, "frequency_hz": …}, …]}}}
Json library_to_json(const TrapLibrary& library);
TrapLibrary json_to_library(const Json& j);

Json report_to_json(const ExecutionReport& report, bool include_theta);

// --- search ---------------------------------------------------------------
// {"graph": {"n": …, "edges": […]}, "well_frequency_bounds_hz": [[lo,hi],…],
//  "global_frequency_bounds_hz": [lo,hi], "spacing_bounds_m": [lo,hi],
//  "gradient_t_per_m": …, "species": …?, "qubit": …?,
//  "symmetry_groups": [[i,j],…]?, "k_max": …?,
//  "incumbent": {"well_frequencies_hz": […], "global_frequency_hz": …,
//                "spacing_m": …}?}
PeriodicSearchProblem json_to_problem(const Json& j);
Json result_to_json(const SearchResult& result, int well_count);

// {"well_frequencies_hz": […], "global_frequency_hz": …, "spacing_m": …}
// -> flat internal vector [well rad/s …, global rad/s, spacing m].
std::vector<double> json_to_parameter_vector(const Json& j, int well_count);
Json evaluation_to_json(const CandidateEvaluation& eval);

// --- states (debug / fixtures) -------------------------------------------
Json state_to_json(const QuantumState& state);

GraphSpec json_to_graph(const Json& j);
Json graph_to_json(const GraphSpec& graph);

}  // namespace ionweave
