#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "coupling.hpp"
#include "spins.hpp"

// Pulse-schedule compilation and execution for cluster-state preparation on
// a transported ion chain: nearest-neighbour pairing windows, selective
// recoupling fragments that isolate one pair of a cohabiting four-ion block,
// and the merged two-block scheme for eight rows. Durations of transports
// and gradient ramps are carried as metadata (simulated as instantaneous).

namespace ionweave {

struct WellCatalog {
  std::vector<HarmonicWell> wells;  // ascending centers, rad/s frequencies
};

using TrapLibrary = std::map<std::string, WellCatalog>;

// One uniform catalog: `count` wells spaced `spacing` apart, all at the same
// frequency (Hz in, rad/s stored), centered on z = 0.
WellCatalog uniform_catalog(int count, double spacing, double frequency_hz);

// Built-in catalogs used by the 2D compiler: "transport8" (8 wells) and
// "transport14" (14 wells), both 260 um spacing at 200 kHz.
TrapLibrary default_trap_library();

struct AssignWells {
  std::string catalog;
  std::vector<int> well_of_ion;  // one catalog well index per ion
};
struct GradientWindow {
  double gradient = 0.0;  // T/m
  double duration = 0.0;  // s
};
struct LocalPulse {
  int qubit = 0;  // X axis
};
struct Transport {
  double duration = 0.0;  // s, metadata only
};
struct RampMetadata {
  double duration = 0.0;  // s, metadata only
};
struct Measure {
  int qubit = 0;
  MeasurementBasis basis;
};

using ScheduleStep = std::variant<AssignWells, GradientWindow, LocalPulse,
                                  Transport, RampMetadata, Measure>;

struct PulseSchedule {
  int n_qubits = 0;
  GraphSpec target;
  std::vector<ScheduleStep> steps;
};

// Structural invariants: non-empty, starts with a well assignment, gradient
// windows only after an assignment, no transport directly against an open
// gradient window, indices and durations valid. Violations -> layout error.
void lint_schedule(const PulseSchedule& schedule);

// Four equal gradient windows of t/4 (t = pi / (2 J_target)) interleaved
// with X pulses on the two non-target qubits of a cohabiting 4-block, in the
// pattern [W, Xa, W, Xa, Xb, W, Xa, W, Xa, Xb]. Signed evolution times of
// every coupling involving a pulsed qubit cancel exactly, so the net
// operator is exp(-i pi/4 sigma_z sigma_z) on the target pair. The public
// form requires the target to be the block's outer pair.
std::vector<ScheduleStep> recoupling_fragment(int block_start,
                                              std::pair<int, int> target_pair,
                                              const CouplingMatrix& j_block,
                                              double gradient);

// Full compiler for the two-column cluster over `rows` rows (2*rows ions):
// rows = 4 -> five top-level stages (NN pairing x2, three block fragments);
// rows = 8 -> two mirrored 4-row compilations plus a boundary merge stage
// combining the four middle ions in one well. Gate durations are derived
// from the catalog physics at compile time; within a pairing stage, pairs
// whose coupling runs faster than the slowest pair are refocused by an echo
// pulse so every pair accrues exactly a quarter-cycle phase.
PulseSchedule build_2d_schedule(int rows, const TrapLibrary& library,
                                double gradient,
                                const QubitSpec& qubit);

struct ExecutionOptions {
  enum class Mode { ideal, residual } mode = Mode::ideal;
  std::uint64_t seed = 0;  // for Measure steps only
};

struct WindowRecord {
  int step_index = 0;
  double duration = 0.0;
  Eigen::MatrixXd theta;  // accumulated J*dt/2 for this window
};

struct ExecutionReport {
  std::vector<WindowRecord> windows;
  std::vector<double> stabilizers;  // after per-vertex degree corrections
  double fidelity = 0.0;            // to graph_state(target); NaN if blockwise
  bool blockwise = false;           // 16-ion path: three partial registers
  double gradient_on_time = 0.0;    // s, sum of window durations
  double wall_clock = 0.0;          // s, windows + transport/ramp metadata
  std::vector<std::string> notes;
  std::vector<int> measurements;    // outcomes of Measure steps, in order
};

struct ExecutionResult {
  std::optional<QuantumState> state;  // corrected final state (if <= cap)
  ExecutionReport report;
};

ExecutionResult execute_schedule(const PulseSchedule& schedule,
                                 const TrapLibrary& library,
                                 const QubitSpec& qubit,
                                 const ExecutionOptions& options);

// Column-reuse protocol: a physical two-column register simulates a longer
// cluster strip. Each round appends a fresh |+> column entangled with the
// data column (pi/4 phases + local corrections, i.e. CZ), optionally with
// vertical intra-column edges, then measures the old column in the supplied
// bases. X-measured wire rounds maintain an exact per-row Pauli frame.
struct ColumnReuseRound {
  std::vector<MeasurementBasis> bases;  // one per row
};

struct ColumnReuseTranscript {
  std::vector<std::vector<int>> outcomes;  // per round, per row
  std::vector<int> frame_x, frame_z;       // per-row Pauli frame bits
  QuantumState final_column;
  bool frame_valid = false;  // true when every round was X-measured
};

ColumnReuseTranscript simulate_column_reuse(
    const std::vector<ColumnReuseRound>& rounds, int n_rows,
    std::uint64_t rng_seed, bool vertical_edges,
    const QuantumState* initial_column = nullptr);

}  // namespace ionweave
