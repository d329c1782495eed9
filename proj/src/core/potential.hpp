#pragma once

#include <string>
#include <variant>
#include <vector>

#include "units.hpp"

// Axial potential-energy models for a linear trap: a single global harmonic
// well, a set of individual harmonic wells (lower envelope), superpositions,
// and a segmented-electrode model U(z) = q * sum_i V_i * phi_i(z) whose
// per-segment shape functions are either a built-in analytic smoothed-step
// lobe or ingested tabulated curves (e.g. from an external field solver).

namespace ionweave {

struct TrapGeometry {
  double layer_separation = 0.0;     // m, electrode layer spacing
  double radial_gap = 0.0;           // m, slit width between layers
  double electrode_thickness = 0.0;  // m
  double segment_length = 0.0;       // m, per segment along the axis
  double isolation_gap = 0.0;        // m, between adjacent segments
  int segment_count = 0;

  void validate() const;
  // Axial smoothing width of the analytic lobe model, tied to the transverse
  // scale of the trap: w = (s + g) / 4.
  double smoothing_width() const {
    return 0.25 * (layer_separation + radial_gap);
  }
  double pitch() const { return segment_length + isolation_gap; }
  // Segment centers on the axis, symmetric about z = 0.
  std::vector<double> segment_centers() const;
};

// Natural cubic spline on a strictly increasing grid; evaluation outside the
// grid is a range error. Supports value, slope and curvature queries.
class CubicSpline {
 public:
  CubicSpline() = default;
  static CubicSpline build(std::vector<double> x, std::vector<double> y);
  double eval(double z, int order) const;
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }
  const std::vector<double>& grid() const { return x_; }
  const std::vector<double>& values() const { return y_; }

 private:
  std::vector<double> x_, y_, m2_;  // m2_ holds second derivatives at nodes
};

// Per-segment shape functions phi_i(z): analytic by default, tabulated after
// ingestion. phi is dimensionless; electrode voltage scales it linearly.
struct SegmentBasis {
  std::vector<CubicSpline> columns;  // empty -> analytic model
  bool tabulated() const { return !columns.empty(); }
  std::size_t count(const TrapGeometry& geom) const {
    return tabulated() ? columns.size()
                       : static_cast<std::size_t>(geom.segment_count);
  }
  double phi(const TrapGeometry& geom, std::size_t i, double z,
             int order) const;
};

struct GlobalHarmonic {
  double nu1 = 0.0;     // rad/s
  double center = 0.0;  // m
};

struct HarmonicWell {
  double center = 0.0;  // m
  double omega = 0.0;   // rad/s
};

// Lower envelope of independent harmonic wells: each point belongs to the
// well whose parabola is lowest there, matching ions localized one-per-well.
struct IndividualWells {
  std::vector<HarmonicWell> wells;
};

struct SegmentedVoltages {
  TrapGeometry geometry;
  std::vector<double> voltages;  // V, one per segment
  SegmentBasis basis;
};

class AxialPotential;

struct Superposed {
  std::vector<AxialPotential> parts;
};

class AxialPotential {
 public:
  using Variant =
      std::variant<GlobalHarmonic, IndividualWells, Superposed,
                   SegmentedVoltages>;

  explicit AxialPotential(Variant v);

  // Potential energy (order 0, J), axial force gradient dU/dz (order 1, J/m)
  // or curvature d2U/dz2 (order 2, J/m^2) at z for the given species.
  double evaluate(const IonSpecies& species, double z, int order) const;

  const Variant& variant() const { return v_; }

  // Human-readable one-line description for provenance fields.
  std::string describe() const;

 private:
  Variant v_;
};

struct WellFit {
  double center = 0.0;        // m, refitted minimum location
  double frequency = 0.0;     // rad/s
  double fit_window = 0.0;    // m, half-width used for the quadratic fit
  double fit_residual = 0.0;  // normalized RMS misfit, dimensionless
};

// Least-squares quadratic fit of the potential over [center-window,
// center+window]; non-positive or degenerate curvature is a not-a-well error.
WellFit fit_harmonic(const AxialPotential& pot, const IonSpecies& species,
                     double center, double window);

// Scan [z_lo, z_hi] on grid_step, refine each bracketed local minimum by
// golden section to sub-pm accuracy, and return harmonic fits sorted by
// center. Plateau-degenerate candidates are dropped.
std::vector<WellFit> find_wells(const AxialPotential& pot,
                                const IonSpecies& species, double z_lo,
                                double z_hi, double grid_step,
                                double fit_window = 40e-6);

// Parse a basis table (CSV text: header `z_m,seg_1_V,...`, strictly
// increasing grid, one unit-voltage column per segment) into spline columns.
SegmentBasis load_basis_functions(const std::string& csv_text);

}  // namespace ionweave
