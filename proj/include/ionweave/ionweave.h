/* ionweave public C interface.
 *
 * Trapped-ion coupling engine: axial potential models, Coulomb-crystal
 * equilibria and normal modes, magnetic-gradient-induced spin-spin coupling
 * matrices, pulse-schedule compilation/execution for two-column cluster
 * states, and a derivative-free trap-parameter search.
 *
 * Conventions:
 *   - Every function returning iw_status reports IW_OK (0) on success; any
 *     other value is an error whose human-readable detail is available from
 *     iw_last_error_message() (thread-local, valid until the next call on
 *     the same thread).
 *   - Structured inputs and outputs are UTF-8 JSON strings. Frequencies in
 *     user-facing JSON are ordinary Hz, lengths m, durations s, gradients
 *     T/m; coupling matrices are rad/s and labeled as such.
 *   - Strings returned through `char**` are heap-allocated; release them
 *     with iw_string_free(). Output pointers are written only on IW_OK.
 *   - Handles (iw_config, iw_crystal) are opaque; free them with the
 *     matching *_free function. NULL is accepted and ignored by the free
 *     functions.
 */

#ifndef IONWEAVE_H
#define IONWEAVE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum iw_status {
  IW_OK = 0,
  IW_ERR_INVALID_ARGUMENT = 1, /* bad call arguments or parameter values */
  IW_ERR_PARSE = 2,            /* malformed JSON/CSV or schema violation */
  IW_ERR_RANGE = 3,            /* evaluation outside tabulated data */
  IW_ERR_NOT_A_WELL = 4,       /* harmonic fit found no confining minimum */
  IW_ERR_CONVERGENCE = 5,      /* iterative solver failed to converge */
  IW_ERR_CONFINEMENT = 6,      /* potential cannot hold the requested ions */
  IW_ERR_UNSTABLE = 7,         /* non-positive normal-mode curvature */
  IW_ERR_SINGULAR = 8,         /* degenerate configuration (e.g. ion overlap) */
  IW_ERR_CAPACITY = 9,         /* register size above the simulator cap */
  IW_ERR_LAYOUT = 10,          /* schedule structure violation */
  IW_ERR_IO = 11,              /* file read/write failure */
  IW_ERR_INTERNAL = 12         /* unexpected failure inside the library */
} iw_status;

/* Library semantic version, e.g. "1.0.0". Static storage; do not free. */
const char* iw_version(void);

/* Stable identifier for a status code, e.g. "parse". Static storage. */
const char* iw_status_name(iw_status status);

/* Detail message of the most recent error on this thread ("" if none). */
const char* iw_last_error_message(void);

/* Release a string obtained from any iw_* output parameter. */
void iw_string_free(char* s);

/* FNV-1a 64-bit hash of a NUL-terminated string (input provenance). */
uint64_t iw_hash_text(const char* text);

/* ------------------------------------------------------------------ */
/* Configurations: potential + species + field + qubit bundle.         */
/* ------------------------------------------------------------------ */

typedef struct iw_config iw_config;
typedef struct iw_crystal iw_crystal;

/* Parse a simulation configuration:
 *   {"potential": {...}, "ion_count": int, "species": {...}?,
 *    "field": {...}?, "qubit": {...}?, "scan": {...}?}
 * Relative `basis_csv` paths inside the potential are resolved against
 * base_dir (NULL means the current directory). */
iw_status iw_config_parse(const char* json_text, const char* base_dir,
                          iw_config** out);
void iw_config_free(iw_config* config);

/* Number of ions the configuration simulates; -1 if config is NULL. */
int iw_config_ion_count(const iw_config* config);

/* Locate confining wells of the configured potential over the scan range
 * and report their centers, frequencies, and fit diagnostics as JSON. */
iw_status iw_config_wells_json(const iw_config* config, char** out);

/* ------------------------------------------------------------------ */
/* Equilibrium crystals, normal modes, coupling matrices.              */
/* ------------------------------------------------------------------ */

/* Solve ion equilibrium positions and normal modes for the configuration;
 * the returned handle snapshots the field/qubit data needed for couplings. */
iw_status iw_crystal_solve(const iw_config* config, iw_crystal** out);
void iw_crystal_free(iw_crystal* crystal);

/* Ion count of a solved crystal; -1 if crystal is NULL. */
int iw_crystal_size(const iw_crystal* crystal);

/* Copy equilibrium positions (m, ascending) into out[0..capacity). The
 * crystal size must not exceed capacity. */
iw_status iw_crystal_positions(const iw_crystal* crystal, double* out,
                               int capacity);

/* JSON report of positions and residual gradient. */
iw_status iw_crystal_report_json(const iw_crystal* crystal, char** out);

/* JSON report of mode frequencies (Hz), mode matrix, and Hessian. */
iw_status iw_crystal_modes_json(const iw_crystal* crystal, char** out);

/* Spin-spin coupling matrix as CSV (header `J_rad_per_s`, row-major). */
iw_status iw_crystal_coupling_csv(const iw_crystal* crystal, char** out);

/* Coupling matrix as JSON with a provenance block. */
iw_status iw_crystal_coupling_json(const iw_crystal* crystal, char** out);

/* ------------------------------------------------------------------ */
/* Pulse schedules.                                                    */
/* ------------------------------------------------------------------ */

/* Compile the two-column cluster-state schedule over `rows` rows (4 or 8;
 * 2*rows ions). catalogs_json selects the well catalogs ({"catalogs": ...});
 * NULL uses the built-in transport catalogs. On success *schedule_json
 * receives the schedule and *catalogs_used_json the catalogs it references
 * (either may be NULL if not wanted). */
iw_status iw_build_2d_schedule(int rows, double gradient_t_per_m,
                               const char* catalogs_json,
                               char** schedule_json,
                               char** catalogs_used_json);

/* Execute a schedule against catalog physics. mode is "ideal" (only the
 * couplings of cohabiting ions act) or "residual" (full coupling matrix
 * including cross-well terms). seed drives measurement outcomes. When
 * include_theta is nonzero the report embeds per-window phase matrices. */
iw_status iw_run_schedule(const char* schedule_json,
                          const char* catalogs_json,
                          const char* mode, uint64_t seed, int include_theta,
                          char** report_json);

/* ------------------------------------------------------------------ */
/* Trap-parameter search.                                              */
/* ------------------------------------------------------------------ */

/* Score one parameter point of a search problem. parameters_json:
 *   {"well_frequencies_hz": [...], "global_frequency_hz": x,
 *    "spacing_m": y}
 * Output JSON holds the periodicity residual (rad^2), the best evolution
 * duration, feasibility, and the coupling-matrix snapshot. */
iw_status iw_evaluate_candidate(const char* problem_json,
                                const char* parameters_json,
                                char** evaluation_json);

/* Seeded derivative-free search over the problem's parameter box; budget
 * counts candidate evaluations. Deterministic for fixed (seed, budget). */
iw_status iw_search_periodic(const char* problem_json, uint64_t seed,
                             int budget, char** result_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* IONWEAVE_H */
