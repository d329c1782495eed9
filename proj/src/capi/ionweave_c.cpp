#include "ionweave/ionweave.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "core/jsonio.hpp"
#include "core/textio.hpp"

// C ABI shim over the C++ core: every entry point converts exceptions into
// status codes and deposits the detail message in a thread-local slot.

namespace {

using namespace ionweave;

thread_local std::string g_last_error;

iw_status map_errc(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return IW_ERR_INVALID_ARGUMENT;
    case Errc::parse: return IW_ERR_PARSE;
    case Errc::range: return IW_ERR_RANGE;
    case Errc::not_a_well: return IW_ERR_NOT_A_WELL;
    case Errc::convergence: return IW_ERR_CONVERGENCE;
    case Errc::confinement: return IW_ERR_CONFINEMENT;
    case Errc::unstable: return IW_ERR_UNSTABLE;
    case Errc::singular: return IW_ERR_SINGULAR;
    case Errc::capacity: return IW_ERR_CAPACITY;
    case Errc::layout: return IW_ERR_LAYOUT;
    case Errc::io: return IW_ERR_IO;
  }
  return IW_ERR_INTERNAL;
}

template <typename F>
iw_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return IW_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_errc(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IW_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return IW_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) fail(Errc::capacity, "out of memory");
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require_arg(bool ok, const char* what) {
  require(ok, Errc::invalid_argument, what);
}

std::string need_text(const char* text, const char* what) {
  require_arg(text != nullptr, what);
  return std::string(text);
}

ionweave::CouplingMatrix crystal_coupling(const iw_crystal* crystal);

}  // namespace

struct iw_config {
  ionweave::SimulationConfig cfg;
};

struct iw_crystal {
  ionweave::IonCrystal crystal;
  ionweave::NormalModes modes;
  ionweave::MagneticField field;
  ionweave::QubitSpec qubit;
};

namespace {

ionweave::CouplingMatrix crystal_coupling(const iw_crystal* crystal) {
  return ionweave::coupling_for_crystal(crystal->crystal, crystal->qubit,
                                        crystal->field);
}

}  // namespace

extern "C" {

const char* iw_version(void) { return "1.0.0"; }

const char* iw_status_name(iw_status status) {
  switch (status) {
    case IW_OK: return "ok";
    case IW_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case IW_ERR_PARSE: return "parse";
    case IW_ERR_RANGE: return "range";
    case IW_ERR_NOT_A_WELL: return "not_a_well";
    case IW_ERR_CONVERGENCE: return "convergence";
    case IW_ERR_CONFINEMENT: return "confinement";
    case IW_ERR_UNSTABLE: return "unstable";
    case IW_ERR_SINGULAR: return "singular";
    case IW_ERR_CAPACITY: return "capacity";
    case IW_ERR_LAYOUT: return "layout";
    case IW_ERR_IO: return "io";
    case IW_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* iw_last_error_message(void) { return g_last_error.c_str(); }

void iw_string_free(char* s) { std::free(s); }

uint64_t iw_hash_text(const char* text) {
  if (!text) return 0;
  return ionweave::fnv1a64(text);
}

iw_status iw_config_parse(const char* json_text, const char* base_dir,
                          iw_config** out) {
  return guarded([&] {
    require_arg(out != nullptr, "output pointer is null");
    const std::string text = need_text(json_text, "config text is null");
    const std::filesystem::path base = base_dir ? base_dir : ".";
    auto parsed = ionweave::json_to_config(
        ionweave::parse_json(text, "config"), base);
    *out = new iw_config{std::move(parsed)};
  });
}

void iw_config_free(iw_config* config) { delete config; }

int iw_config_ion_count(const iw_config* config) {
  return config ? config->cfg.ion_count : -1;
}

iw_status iw_config_wells_json(const iw_config* config, char** out) {
  return guarded([&] {
    require_arg(config != nullptr, "config handle is null");
    require_arg(out != nullptr, "output pointer is null");
    require(config->cfg.scan.has_value(), Errc::invalid_argument,
            "config has no scan block (z_min_m/z_max_m/grid_step_m required)");
    const auto& scan = *config->cfg.scan;
    std::vector<ionweave::WellFit> wells =
        scan.fit_window > 0
            ? ionweave::find_wells(config->cfg.potential, config->cfg.species,
                                   scan.z_min, scan.z_max, scan.grid_step,
                                   scan.fit_window)
            : ionweave::find_wells(config->cfg.potential, config->cfg.species,
                                   scan.z_min, scan.z_max, scan.grid_step);
    *out = dup_string(ionweave::wells_to_json(wells).dump(2) + "\n");
  });
}

iw_status iw_crystal_solve(const iw_config* config, iw_crystal** out) {
  return guarded([&] {
    require_arg(config != nullptr, "config handle is null");
    require_arg(out != nullptr, "output pointer is null");
    ionweave::IonCrystal crystal = ionweave::solve_equilibrium(
        config->cfg.potential, config->cfg.species, config->cfg.ion_count);
    ionweave::NormalModes modes = ionweave::normal_modes(crystal);
    *out = new iw_crystal{std::move(crystal), std::move(modes),
                          config->cfg.field, config->cfg.qubit};
  });
}

void iw_crystal_free(iw_crystal* crystal) { delete crystal; }

int iw_crystal_size(const iw_crystal* crystal) {
  return crystal ? static_cast<int>(crystal->crystal.positions.size()) : -1;
}

iw_status iw_crystal_positions(const iw_crystal* crystal, double* out,
                               int capacity) {
  return guarded([&] {
    require_arg(crystal != nullptr, "crystal handle is null");
    require_arg(out != nullptr, "output pointer is null");
    const auto& z = crystal->crystal.positions;
    require(static_cast<int>(z.size()) <= capacity, Errc::capacity,
            "position buffer too small");
    std::memcpy(out, z.data(), z.size() * sizeof(double));
  });
}

iw_status iw_crystal_report_json(const iw_crystal* crystal, char** out) {
  return guarded([&] {
    require_arg(crystal != nullptr, "crystal handle is null");
    require_arg(out != nullptr, "output pointer is null");
    *out =
        dup_string(ionweave::crystal_to_json(crystal->crystal).dump(2) + "\n");
  });
}

iw_status iw_crystal_modes_json(const iw_crystal* crystal, char** out) {
  return guarded([&] {
    require_arg(crystal != nullptr, "crystal handle is null");
    require_arg(out != nullptr, "output pointer is null");
    *out = dup_string(
        ionweave::modes_to_json(crystal->crystal, crystal->modes).dump(2) +
        "\n");
  });
}

iw_status iw_crystal_coupling_csv(const iw_crystal* crystal, char** out) {
  return guarded([&] {
    require_arg(crystal != nullptr, "crystal handle is null");
    require_arg(out != nullptr, "output pointer is null");
    *out = dup_string(ionweave::coupling_to_csv(crystal_coupling(crystal)));
  });
}

iw_status iw_crystal_coupling_json(const iw_crystal* crystal, char** out) {
  return guarded([&] {
    require_arg(crystal != nullptr, "crystal handle is null");
    require_arg(out != nullptr, "output pointer is null");
    *out = dup_string(ionweave::coupling_to_json(crystal_coupling(crystal),
                                                 crystal->field,
                                                 crystal->qubit)
                          .dump(2) +
                      "\n");
  });
}

iw_status iw_build_2d_schedule(int rows, double gradient_t_per_m,
                               const char* catalogs_json,
                               char** schedule_json,
                               char** catalogs_used_json) {
  return guarded([&] {
    ionweave::TrapLibrary library =
        catalogs_json
            ? ionweave::json_to_library(
                  ionweave::parse_json(catalogs_json, "catalogs"))
            : ionweave::default_trap_library();
    const ionweave::QubitSpec qubit{ionweave::yb171(), 1.0};
    ionweave::PulseSchedule schedule = ionweave::build_2d_schedule(
        rows, library, gradient_t_per_m, qubit);
    if (schedule_json)
      *schedule_json =
          dup_string(ionweave::schedule_to_json(schedule).dump(2) + "\n");
    if (catalogs_used_json) {
      ionweave::TrapLibrary used;
      for (const auto& step : schedule.steps)
        if (const auto* aw = std::get_if<ionweave::AssignWells>(&step))
          used[aw->catalog] = library.at(aw->catalog);
      *catalogs_used_json =
          dup_string(ionweave::library_to_json(used).dump(2) + "\n");
    }
  });
}

iw_status iw_run_schedule(const char* schedule_json,
                          const char* catalogs_json,
                          const char* mode, uint64_t seed, int include_theta,
                          char** report_json) {
  return guarded([&] {
    require_arg(report_json != nullptr, "output pointer is null");
    const std::string schedule_text =
        need_text(schedule_json, "schedule text is null");
    const std::string mode_text = need_text(mode, "mode is null");
    ionweave::ExecutionOptions options;
    if (mode_text == "ideal") {
      options.mode = ionweave::ExecutionOptions::Mode::ideal;
    } else if (mode_text == "residual") {
      options.mode = ionweave::ExecutionOptions::Mode::residual;
    } else {
      ionweave::fail(ionweave::Errc::invalid_argument,
                     "mode must be 'ideal' or 'residual', got '" + mode_text +
                         "'");
    }
    options.seed = seed;
    ionweave::PulseSchedule schedule = ionweave::json_to_schedule(
        ionweave::parse_json(schedule_text, "schedule"));
    ionweave::TrapLibrary library =
        catalogs_json
            ? ionweave::json_to_library(
                  ionweave::parse_json(catalogs_json, "catalogs"))
            : ionweave::default_trap_library();
    const ionweave::QubitSpec qubit{ionweave::yb171(), 1.0};
    ionweave::ExecutionResult result =
        ionweave::execute_schedule(schedule, library, qubit, options);
    *report_json = dup_string(
        ionweave::report_to_json(result.report, include_theta != 0).dump(2) +
        "\n");
  });
}

iw_status iw_evaluate_candidate(const char* problem_json,
                                const char* parameters_json,
                                char** evaluation_json) {
  return guarded([&] {
    require_arg(evaluation_json != nullptr, "output pointer is null");
    ionweave::PeriodicSearchProblem problem = ionweave::json_to_problem(
        ionweave::parse_json(need_text(problem_json, "problem text is null"),
                             "problem"));
    std::vector<double> params = ionweave::json_to_parameter_vector(
        ionweave::parse_json(
            need_text(parameters_json, "parameters text is null"),
            "parameters"),
        problem.graph.n);
    ionweave::CandidateEvaluation eval =
        ionweave::evaluate_candidate(problem, params);
    *evaluation_json =
        dup_string(ionweave::evaluation_to_json(eval).dump(2) + "\n");
  });
}

iw_status iw_search_periodic(const char* problem_json, uint64_t seed,
                             int budget, char** result_json) {
  return guarded([&] {
    require_arg(result_json != nullptr, "output pointer is null");
    ionweave::PeriodicSearchProblem problem = ionweave::json_to_problem(
        ionweave::parse_json(need_text(problem_json, "problem text is null"),
                             "problem"));
    ionweave::SearchResult result = ionweave::search(problem, seed, budget);
    *result_json = dup_string(
        ionweave::result_to_json(result, problem.graph.n).dump(2) + "\n");
  });
}

}  // extern "C"
