#include "jsonio.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "textio.hpp"

namespace ionweave {

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& why) {
  fail(Errc::parse, where + ": " + why);
}

double as_number(const Json& j, const std::string& where) {
  if (!j.is_number())
    parse_fail(where, "expected a number, got " + std::string(j.type_name()));
  const double v = j.get<double>();
  if (!std::isfinite(v)) parse_fail(where, "value must be finite");
  return v;
}

double need_number(const Json& j, const std::string& key,
                   const std::string& where) {
  if (!j.contains(key)) parse_fail(where, "missing field '" + key + "'");
  return as_number(j.at(key), where + "." + key);
}

double number_or(const Json& j, const std::string& key, double fallback,
                 const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return as_number(j.at(key), where + "." + key);
}

int need_int(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) parse_fail(where, "missing field '" + key + "'");
  const Json& v = j.at(key);
  if (!v.is_number_integer())
    parse_fail(where + "." + key, "expected an integer");
  return v.get<int>();
}

std::string need_string(const Json& j, const std::string& key,
                        const std::string& where) {
  if (!j.contains(key)) parse_fail(where, "missing field '" + key + "'");
  const Json& v = j.at(key);
  if (!v.is_string()) parse_fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

const Json& need_array(const Json& j, const std::string& key,
                       const std::string& where) {
  if (!j.contains(key)) parse_fail(where, "missing field '" + key + "'");
  const Json& v = j.at(key);
  if (!v.is_array()) parse_fail(where + "." + key, "expected an array");
  return v;
}

std::vector<double> number_list(const Json& arr, const std::string& where) {
  std::vector<double> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(as_number(arr[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json finite_or_null(double v) {
  if (std::isfinite(v)) return Json(v);
  return Json(nullptr);
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  require(!in.bad(), Errc::io, "read error on '" + path.string() + "'");
  return buf.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), Errc::io,
          "cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  require(out.good(), Errc::io, "write error on '" + path.string() + "'");
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    parse_fail(origin, e.what());
  }
}

Json load_json_file(const std::filesystem::path& path) {
  return parse_json(read_text_file(path), path.string());
}

IonSpecies json_to_species(const Json& j) {
  if (j.is_null()) return yb171();
  if (!j.is_object()) fail(Errc::parse, "species: expected an object");
  IonSpecies s = yb171();
  if (j.contains("name")) s.name = need_string(j, "name", "species");
  if (j.contains("mass_kg")) {
    s.mass = need_number(j, "mass_kg", "species");
  } else if (j.contains("mass_amu")) {
    s.mass = need_number(j, "mass_amu", "species") * amu;
  }
  s.charge = number_or(j, "charge_e", s.charge / elem_charge, "species") *
             elem_charge;
  require(s.mass > 0, Errc::parse, "species.mass must be positive");
  require(s.charge != 0, Errc::parse, "species.charge_e must be nonzero");
  return s;
}

Json species_to_json(const IonSpecies& s) {
  Json j;
  j["name"] = s.name;
  j["mass_amu"] = s.mass / amu;
  j["charge_e"] = s.charge / elem_charge;
  return j;
}

MagneticField json_to_field(const Json& j) {
  MagneticField f;
  if (j.is_null()) return f;
  if (!j.is_object()) fail(Errc::parse, "field: expected an object");
  f.gradient = number_or(j, "gradient_t_per_m", 0.0, "field");
  f.offset = number_or(j, "offset_t", 0.0, "field");
  f.validate();
  return f;
}

Json field_to_json(const MagneticField& f) {
  Json j;
  j["gradient_t_per_m"] = f.gradient;
  j["offset_t"] = f.offset;
  return j;
}

QubitSpec json_to_qubit(const Json& j, const IonSpecies& species) {
  QubitSpec q;
  q.species = species;
  if (j.is_null()) return q;
  if (!j.is_object()) fail(Errc::parse, "qubit: expected an object");
  q.gradient_factor = number_or(j, "gradient_factor", 1.0, "qubit");
  return q;
}

namespace {

TrapGeometry json_to_geometry(const Json& j, const std::string& where) {
  if (!j.is_object()) parse_fail(where, "expected an object");
  TrapGeometry g;
  g.layer_separation = need_number(j, "layer_separation_m", where);
  g.radial_gap = need_number(j, "radial_gap_m", where);
  g.electrode_thickness = need_number(j, "electrode_thickness_m", where);
  g.segment_length = need_number(j, "segment_length_m", where);
  g.isolation_gap = need_number(j, "isolation_gap_m", where);
  g.segment_count = need_int(j, "segment_count", where);
  g.validate();
  return g;
}

AxialPotential parse_potential(const Json& j,
                               const std::filesystem::path& base_dir,
                               const std::string& where) {
  if (!j.is_object()) parse_fail(where, "expected an object");
  const std::string variant = need_string(j, "variant", where);
  if (variant == "harmonic") {
    GlobalHarmonic g;
    g.nu1 = hz_to_rad(need_number(j, "nu1_hz", where));
    g.center = number_or(j, "center_m", 0.0, where);
    require(g.nu1 > 0, Errc::parse, where + ".nu1_hz must be positive");
    return AxialPotential{g};
  }
  if (variant == "wells") {
    IndividualWells w;
    const Json& arr = need_array(j, "wells", where);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string at = where + ".wells[" + std::to_string(i) + "]";
      HarmonicWell well;
      well.center = need_number(arr[i], "center_m", at);
      well.omega = hz_to_rad(need_number(arr[i], "omega_hz", at));
      require(well.omega > 0, Errc::parse, at + ".omega_hz must be positive");
      w.wells.push_back(well);
    }
    require(!w.wells.empty(), Errc::parse, where + ".wells must be non-empty");
    return AxialPotential{std::move(w)};
  }
  if (variant == "superposed") {
    Superposed s;
    const Json& arr = need_array(j, "parts", where);
    for (std::size_t i = 0; i < arr.size(); ++i)
      s.parts.push_back(parse_potential(
          arr[i], base_dir, where + ".parts[" + std::to_string(i) + "]"));
    require(!s.parts.empty(), Errc::parse, where + ".parts must be non-empty");
    return AxialPotential{std::move(s)};
  }
  if (variant == "segmented") {
    SegmentedVoltages sv;
    if (!j.contains("geometry")) parse_fail(where, "missing field 'geometry'");
    sv.geometry = json_to_geometry(j.at("geometry"), where + ".geometry");
    sv.voltages = number_list(need_array(j, "voltages_v", where),
                              where + ".voltages_v");
    if (j.contains("basis_csv")) {
      const std::filesystem::path rel = need_string(j, "basis_csv", where);
      const std::filesystem::path full =
          rel.is_absolute() ? rel : base_dir / rel;
      sv.basis = load_basis_functions(read_text_file(full));
    }
    return AxialPotential{std::move(sv)};
  }
  parse_fail(where + ".variant", "unknown potential variant '" + variant +
                                     "' (expected harmonic, wells, "
                                     "superposed, or segmented)");
}

}  // namespace

AxialPotential json_to_potential(const Json& j,
                                 const std::filesystem::path& base_dir) {
  return parse_potential(j, base_dir, "potential");
}

SimulationConfig json_to_config(const Json& j,
                                const std::filesystem::path& base_dir) {
  if (!j.is_object()) fail(Errc::parse, "config: expected a JSON object");
  if (!j.contains("potential"))
    fail(Errc::parse, "config: missing field 'potential'");
  SimulationConfig cfg{
      json_to_potential(j.at("potential"), base_dir),
      json_to_species(j.contains("species") ? j.at("species") : Json(nullptr)),
      0,
      MagneticField{},
      QubitSpec{},
      std::nullopt};
  cfg.ion_count = need_int(j, "ion_count", "config");
  require(cfg.ion_count >= 1, Errc::parse, "config.ion_count must be >= 1");
  cfg.field =
      json_to_field(j.contains("field") ? j.at("field") : Json(nullptr));
  cfg.qubit = json_to_qubit(j.contains("qubit") ? j.at("qubit") : Json(nullptr),
                            cfg.species);
  if (j.contains("scan")) {
    const Json& s = j.at("scan");
    ScanSpec scan;
    scan.z_min = need_number(s, "z_min_m", "config.scan");
    scan.z_max = need_number(s, "z_max_m", "config.scan");
    scan.grid_step = need_number(s, "grid_step_m", "config.scan");
    scan.fit_window = number_or(s, "fit_window_m", 0.0, "config.scan");
    require(scan.z_max > scan.z_min, Errc::parse,
            "config.scan: z_max_m must exceed z_min_m");
    require(scan.grid_step > 0, Errc::parse,
            "config.scan.grid_step_m must be positive");
    cfg.scan = scan;
  }
  return cfg;
}

Json crystal_to_json(const IonCrystal& crystal) {
  Json j;
  j["units"] = {{"positions", "m"}, {"gradient_norm", "J/m"}};
  j["species"] = species_to_json(crystal.species);
  j["potential"] = crystal.potential.describe();
  j["positions_m"] = crystal.positions;
  j["gradient_norm"] = crystal.gradient_norm;
  return j;
}

Json modes_to_json(const IonCrystal& crystal, const NormalModes& modes) {
  Json j;
  j["units"] = {{"positions", "m"},
                {"frequencies", "Hz"},
                {"hessian", "J/m^2"},
                {"mass", "kg"}};
  j["positions_m"] = crystal.positions;
  Json freqs = Json::array();
  for (double nu : modes.frequencies) freqs.push_back(rad_to_hz(nu));
  j["frequencies_hz"] = std::move(freqs);
  j["mode_matrix"] = matrix_to_json(modes.mode_matrix);
  j["hessian"] = matrix_to_json(modes.hessian);
  j["mass_kg"] = modes.mass;
  return j;
}

Json wells_to_json(const std::vector<WellFit>& wells) {
  Json j;
  j["units"] = {{"centers", "m"}, {"frequencies", "Hz"}};
  Json arr = Json::array();
  for (const WellFit& w : wells) {
    Json e;
    e["center_m"] = w.center;
    e["frequency_hz"] = rad_to_hz(w.frequency);
    e["fit_window_m"] = w.fit_window;
    e["fit_residual"] = w.fit_residual;
    arr.push_back(std::move(e));
  }
  j["wells"] = std::move(arr);
  return j;
}

std::string coupling_to_csv(const CouplingMatrix& j) {
  std::string out = "J_rad_per_s\n";
  for (Eigen::Index r = 0; r < j.j.rows(); ++r) {
    for (Eigen::Index c = 0; c < j.j.cols(); ++c) {
      if (c) out += ',';
      out += format_double(j.j(r, c));
    }
    out += '\n';
  }
  return out;
}

Json coupling_to_json(const CouplingMatrix& j, const MagneticField& field,
                      const QubitSpec& qubit) {
  Json out;
  // Both conventions are reported so downstream consumers never have to
  // guess whether a quoted coupling is angular or ordinary frequency.
  out["units"] = {{"j_rad_per_s", "rad/s"}, {"j_over_two_pi_hz", "Hz"}};
  out["provenance"] = {{"configuration", j.provenance},
                       {"field", field_to_json(field)},
                       {"species", species_to_json(qubit.species)},
                       {"gradient_factor", qubit.gradient_factor}};
  out["j_rad_per_s"] = matrix_to_json(j.j);
  out["j_over_two_pi_hz"] = matrix_to_json(j.j / two_pi);
  return out;
}

namespace {

Json basis_to_json(const MeasurementBasis& b) {
  if (b.kind == MeasurementBasis::Kind::z) return Json("Z");
  if (b.angle == 0.0) return Json("X");
  if (b.angle == 1.5707963267948966) return Json("Y");
  Json j;
  j["plane_angle_rad"] = b.angle;
  return j;
}

MeasurementBasis json_to_basis(const Json& j, const std::string& where) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "X") return MeasurementBasis::x();
    if (s == "Y") return MeasurementBasis::y();
    if (s == "Z") return MeasurementBasis::z();
    parse_fail(where, "unknown basis '" + s + "' (expected X, Y, or Z)");
  }
  if (j.is_object() && j.contains("plane_angle_rad"))
    return MeasurementBasis::plane(
        as_number(j.at("plane_angle_rad"), where + ".plane_angle_rad"));
  parse_fail(where, "expected \"X\"/\"Y\"/\"Z\" or {\"plane_angle_rad\": …}");
}

Json step_to_json(const ScheduleStep& step) {
  Json j;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AssignWells>) {
          j["kind"] = "AssignWells";
          j["catalog"] = s.catalog;
          j["wells"] = s.well_of_ion;
        } else if constexpr (std::is_same_v<T, GradientWindow>) {
          j["kind"] = "GradientWindow";
          j["gradient_t_per_m"] = s.gradient;
          j["duration_s"] = s.duration;
        } else if constexpr (std::is_same_v<T, LocalPulse>) {
          j["kind"] = "LocalPulse";
          j["qubit"] = s.qubit;
          j["axis"] = "X";
        } else if constexpr (std::is_same_v<T, Transport>) {
          j["kind"] = "Transport";
          j["duration_s"] = s.duration;
        } else if constexpr (std::is_same_v<T, RampMetadata>) {
          j["kind"] = "RampMetadata";
          j["duration_s"] = s.duration;
        } else {
          j["kind"] = "Measure";
          j["qubit"] = s.qubit;
          j["basis"] = basis_to_json(s.basis);
        }
      },
      step);
  return j;
}

ScheduleStep json_to_step(const Json& j, const std::string& where) {
  const std::string kind = need_string(j, "kind", where);
  if (kind == "AssignWells") {
    AssignWells s;
    s.catalog = need_string(j, "catalog", where);
    const Json& arr = need_array(j, "wells", where);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const Json& v = arr[i];
      if (!v.is_number_integer())
        parse_fail(where + ".wells[" + std::to_string(i) + "]",
                   "expected an integer well index");
      s.well_of_ion.push_back(v.get<int>());
    }
    return s;
  }
  if (kind == "GradientWindow") {
    GradientWindow s;
    s.gradient = need_number(j, "gradient_t_per_m", where);
    s.duration = need_number(j, "duration_s", where);
    return s;
  }
  if (kind == "LocalPulse") {
    LocalPulse s;
    s.qubit = need_int(j, "qubit", where);
    if (j.contains("axis")) {
      const std::string axis = need_string(j, "axis", where);
      if (axis != "X") parse_fail(where + ".axis", "only X pulses supported");
    }
    return s;
  }
  if (kind == "Transport") return Transport{need_number(j, "duration_s", where)};
  if (kind == "RampMetadata")
    return RampMetadata{need_number(j, "duration_s", where)};
  if (kind == "Measure") {
    Measure s;
    s.qubit = need_int(j, "qubit", where);
    if (!j.contains("basis")) parse_fail(where, "missing field 'basis'");
    s.basis = json_to_basis(j.at("basis"), where + ".basis");
    return s;
  }
  parse_fail(where + ".kind", "unknown step kind '" + kind + "'");
}

std::vector<std::pair<int, int>> json_to_edges(const Json& arr,
                                               const std::string& where) {
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    const Json& e = arr[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer())
      parse_fail(at, "expected a two-integer pair");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return edges;
}

Json edges_to_json(const std::vector<std::pair<int, int>>& edges) {
  Json arr = Json::array();
  for (const auto& [a, b] : edges) arr.push_back(Json::array({a, b}));
  return arr;
}

}  // namespace

GraphSpec json_to_graph(const Json& j) {
  if (!j.is_object()) fail(Errc::parse, "graph: expected an object");
  const int n = need_int(j, "n", "graph");
  auto edges = json_to_edges(need_array(j, "edges", "graph"), "graph.edges");
  try {
    return GraphSpec::make(n, std::move(edges));
  } catch (const Error& e) {
    fail(Errc::parse, std::string("graph: ") + e.what());
  }
}

Json graph_to_json(const GraphSpec& graph) {
  Json j;
  j["n"] = graph.n;
  j["edges"] = edges_to_json(graph.edges);
  return j;
}

Json schedule_to_json(const PulseSchedule& schedule) {
  Json j;
  j["n_qubits"] = schedule.n_qubits;
  j["target_edges"] = edges_to_json(schedule.target.edges);
  Json steps = Json::array();
  for (const ScheduleStep& s : schedule.steps) steps.push_back(step_to_json(s));
  j["steps"] = std::move(steps);
  return j;
}

PulseSchedule json_to_schedule(const Json& j) {
  if (!j.is_object()) fail(Errc::parse, "schedule: expected a JSON object");
  PulseSchedule s;
  s.n_qubits = need_int(j, "n_qubits", "schedule");
  require(s.n_qubits >= 1, Errc::parse, "schedule.n_qubits must be >= 1");
  auto edges = json_to_edges(need_array(j, "target_edges", "schedule"),
                             "schedule.target_edges");
  try {
    s.target = GraphSpec::make(s.n_qubits, std::move(edges));
  } catch (const Error& e) {
    fail(Errc::parse, std::string("schedule.target_edges: ") + e.what());
  }
  const Json& steps = need_array(j, "steps", "schedule");
  for (std::size_t i = 0; i < steps.size(); ++i)
    s.steps.push_back(
        json_to_step(steps[i], "schedule.steps[" + std::to_string(i) + "]"));
  return s;
}

Json library_to_json(const TrapLibrary& library) {
  Json cats = Json::object();
  for (const auto& [name, catalog] : library) {
    Json wells = Json::array();
    for (const HarmonicWell& w : catalog.wells) {
      Json e;
      e["center_m"] = w.center;
      e["frequency_hz"] = rad_to_hz(w.omega);
      wells.push_back(std::move(e));
    }
    Json c;
    c["wells"] = std::move(wells);
    cats[name] = std::move(c);
  }
  Json j;
  j["catalogs"] = std::move(cats);
  return j;
}

TrapLibrary json_to_library(const Json& j) {
  if (!j.is_object() || !j.contains("catalogs"))
    fail(Errc::parse, "catalog file: missing field 'catalogs'");
  const Json& cats = j.at("catalogs");
  if (!cats.is_object())
    fail(Errc::parse, "catalog file: 'catalogs' must be an object");
  TrapLibrary lib;
  for (const auto& [name, cat] : cats.items()) {
    const std::string where = "catalogs." + name;
    WellCatalog catalog;
    const Json& wells = need_array(cat, "wells", where);
    for (std::size_t i = 0; i < wells.size(); ++i) {
      const std::string at = where + ".wells[" + std::to_string(i) + "]";
      HarmonicWell w;
      w.center = need_number(wells[i], "center_m", at);
      w.omega = hz_to_rad(need_number(wells[i], "frequency_hz", at));
      require(w.omega > 0, Errc::parse, at + ".frequency_hz must be positive");
      catalog.wells.push_back(w);
    }
    require(!catalog.wells.empty(), Errc::parse, where + " has no wells");
    lib[name] = std::move(catalog);
  }
  return lib;
}

Json report_to_json(const ExecutionReport& report, bool include_theta) {
  Json j;
  j["units"] = {{"durations", "s"}, {"theta", "rad"}};
  j["blockwise"] = report.blockwise;
  Json windows = Json::array();
  for (const WindowRecord& w : report.windows) {
    Json e;
    e["step_index"] = w.step_index;
    e["duration_s"] = w.duration;
    if (include_theta) e["theta"] = matrix_to_json(w.theta);
    windows.push_back(std::move(e));
  }
  j["windows"] = std::move(windows);
  j["stabilizers"] = report.stabilizers;
  j["fidelity"] = finite_or_null(report.fidelity);
  j["gradient_on_time_s"] = report.gradient_on_time;
  j["wall_clock_s"] = report.wall_clock;
  j["measurements"] = report.measurements;
  j["notes"] = report.notes;
  return j;
}

namespace {

ParamBounds json_to_bounds(const Json& j, double scale,
                           const std::string& where) {
  if (!j.is_array() || j.size() != 2)
    parse_fail(where, "expected [lo, hi]");
  ParamBounds b;
  b.lo = as_number(j[0], where + "[0]") * scale;
  b.hi = as_number(j[1], where + "[1]") * scale;
  if (!(b.lo > 0 && b.hi >= b.lo))
    parse_fail(where, "bounds must satisfy 0 < lo <= hi");
  return b;
}

}  // namespace

PeriodicSearchProblem json_to_problem(const Json& j) {
  if (!j.is_object()) fail(Errc::parse, "problem: expected a JSON object");
  PeriodicSearchProblem p;
  if (!j.contains("graph")) fail(Errc::parse, "problem: missing field 'graph'");
  p.graph = json_to_graph(j.at("graph"));
  const Json& wf = need_array(j, "well_frequency_bounds_hz", "problem");
  for (std::size_t i = 0; i < wf.size(); ++i)
    p.well_frequency.push_back(json_to_bounds(
        wf[i], two_pi,
        "problem.well_frequency_bounds_hz[" + std::to_string(i) + "]"));
  if (!j.contains("global_frequency_bounds_hz"))
    fail(Errc::parse, "problem: missing field 'global_frequency_bounds_hz'");
  p.global_frequency = json_to_bounds(j.at("global_frequency_bounds_hz"),
                                      two_pi,
                                      "problem.global_frequency_bounds_hz");
  if (!j.contains("spacing_bounds_m"))
    fail(Errc::parse, "problem: missing field 'spacing_bounds_m'");
  p.spacing =
      json_to_bounds(j.at("spacing_bounds_m"), 1.0, "problem.spacing_bounds_m");
  p.gradient = need_number(j, "gradient_t_per_m", "problem");
  p.species =
      json_to_species(j.contains("species") ? j.at("species") : Json(nullptr));
  p.gradient_factor =
      json_to_qubit(j.contains("qubit") ? j.at("qubit") : Json(nullptr),
                    p.species)
          .gradient_factor;
  if (j.contains("symmetry_groups")) {
    const Json& groups = j.at("symmetry_groups");
    if (!groups.is_array())
      fail(Errc::parse, "problem.symmetry_groups: expected an array");
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const std::string at =
          "problem.symmetry_groups[" + std::to_string(g) + "]";
      const Json& grp = groups[g];
      if (!grp.is_array()) parse_fail(at, "expected an index array");
      std::vector<int> idx;
      for (std::size_t i = 0; i < grp.size(); ++i) {
        if (!grp[i].is_number_integer())
          parse_fail(at + "[" + std::to_string(i) + "]", "expected an integer");
        idx.push_back(grp[i].get<int>());
      }
      p.symmetry_groups.push_back(std::move(idx));
    }
  }
  if (j.contains("k_max")) p.k_max = need_int(j, "k_max", "problem");
  if (j.contains("incumbent")) {
    const Json& inc = j.at("incumbent");
    const std::string where = "problem.incumbent";
    std::vector<double> params =
        number_list(need_array(inc, "well_frequencies_hz", where),
                    where + ".well_frequencies_hz");
    for (double& v : params) v *= two_pi;
    params.push_back(hz_to_rad(need_number(inc, "global_frequency_hz", where)));
    params.push_back(need_number(inc, "spacing_m", where));
    p.incumbent = std::move(params);
  }
  try {
    p.validate();
  } catch (const Error& e) {
    fail(Errc::parse, std::string("problem: ") + e.what());
  }
  return p;
}

Json result_to_json(const SearchResult& result, int well_count) {
  Json j;
  j["units"] = {{"frequencies", "Hz"},
                {"spacing", "m"},
                {"duration", "s"},
                {"residual", "rad^2"},
                {"j", "rad/s"}};
  Json params;
  Json wells = Json::array();
  for (int i = 0; i < well_count; ++i)
    wells.push_back(rad_to_hz(result.parameters[static_cast<std::size_t>(i)]));
  params["well_frequencies_hz"] = std::move(wells);
  params["global_frequency_hz"] =
      rad_to_hz(result.parameters[static_cast<std::size_t>(well_count)]);
  params["spacing_m"] =
      result.parameters[static_cast<std::size_t>(well_count) + 1];
  j["parameters"] = std::move(params);
  j["best_duration_s"] = result.best_duration;
  j["residual_rad2"] = result.residual;
  j["feasible"] = result.feasible;
  j["evaluations"] = result.evaluations;
  j["j_rad_per_s"] = matrix_to_json(result.j.j);
  return j;
}

std::vector<double> json_to_parameter_vector(const Json& j, int well_count) {
  if (!j.is_object()) fail(Errc::parse, "parameters: expected a JSON object");
  const std::string where = "parameters";
  std::vector<double> params = number_list(
      need_array(j, "well_frequencies_hz", where),
      where + ".well_frequencies_hz");
  if (static_cast<int>(params.size()) != well_count)
    fail(Errc::parse, "parameters.well_frequencies_hz: expected " +
                          std::to_string(well_count) + " entries, got " +
                          std::to_string(params.size()));
  for (double& v : params) v *= two_pi;
  params.push_back(hz_to_rad(need_number(j, "global_frequency_hz", where)));
  params.push_back(need_number(j, "spacing_m", where));
  return params;
}

Json evaluation_to_json(const CandidateEvaluation& eval) {
  Json j;
  j["units"] = {{"residual", "rad^2"}, {"duration", "s"}, {"j", "rad/s"}};
  j["residual_rad2"] = eval.residual;
  j["best_duration_s"] = eval.best_duration;
  j["feasible"] = eval.feasible;
  j["j_rad_per_s"] = matrix_to_json(eval.j.j);
  return j;
}

Json state_to_json(const QuantumState& state) {
  Json j;
  j["n"] = state.n();
  j["bit_convention"] =
      "qubit k is bit k (LSB first); bit 0 encodes Z eigenvalue +1";
  Json amps = Json::array();
  for (const auto& a : state.amplitudes())
    amps.push_back(Json::array({a.real(), a.imag()}));
  j["amplitudes"] = std::move(amps);
  return j;
}

}  // namespace ionweave
