#include "potential.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "errors.hpp"
#include "minimize.hpp"

namespace ionweave {

void TrapGeometry::validate() const {
  require(layer_separation > 0 && radial_gap > 0 && electrode_thickness > 0 &&
              segment_length > 0 && isolation_gap > 0,
          Errc::invalid_argument, "trap geometry lengths must be positive");
  require(segment_count >= 1, Errc::invalid_argument,
          "segment_count must be >= 1");
}

std::vector<double> TrapGeometry::segment_centers() const {
  std::vector<double> c(static_cast<std::size_t>(segment_count));
  const double mid = 0.5 * (segment_count - 1);
  for (int i = 0; i < segment_count; ++i)
    c[static_cast<std::size_t>(i)] = (i - mid) * pitch();
  return c;
}

// ---------------------------------------------------------------------------
// Natural cubic spline

CubicSpline CubicSpline::build(std::vector<double> x, std::vector<double> y) {
  require(x.size() == y.size(), Errc::parse,
          "spline grid and value counts differ");
  require(x.size() >= 2, Errc::parse, "spline needs at least two nodes");
  for (std::size_t i = 1; i < x.size(); ++i)
    require(x[i] > x[i - 1], Errc::parse,
            "spline grid must be strictly increasing");

  const std::size_t n = x.size();
  std::vector<double> m2(n, 0.0);
  if (n > 2) {
    // Thomas solve of the tridiagonal system for interior second derivatives.
    std::vector<double> diag(n - 2), rhs(n - 2), upper(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
      diag[i - 1] = 2.0 * (h0 + h1);
      upper[i - 1] = h1;
      rhs[i - 1] =
          6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    for (std::size_t i = 1; i < n - 2; ++i) {
      const double w = (x[i + 1] - x[i]) / diag[i - 1];  // lower / pivot
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i-- > 0;) {
      const double up = (i + 1 < n - 2) ? upper[i] * m2[i + 2] : 0.0;
      m2[i + 1] = (rhs[i] - up) / diag[i];
    }
  }

  CubicSpline s;
  s.x_ = std::move(x);
  s.y_ = std::move(y);
  s.m2_ = std::move(m2);
  return s;
}

double CubicSpline::eval(double z, int order) const {
  require(!x_.empty(), Errc::invalid_argument, "empty spline");
  require(z >= x_.front() && z <= x_.back(), Errc::range,
          "evaluation outside tabulated basis range");
  auto it = std::upper_bound(x_.begin(), x_.end(), z);
  std::size_t i = static_cast<std::size_t>(it - x_.begin());
  if (i == 0) i = 1;
  if (i == x_.size()) i = x_.size() - 1;
  const double h = x_[i] - x_[i - 1];
  const double a = (x_[i] - z) / h, b = (z - x_[i - 1]) / h;
  const double ma = m2_[i - 1], mb = m2_[i];
  switch (order) {
    case 0:
      return a * y_[i - 1] + b * y_[i] +
             ((a * a * a - a) * ma + (b * b * b - b) * mb) * h * h / 6.0;
    case 1:
      return (y_[i] - y_[i - 1]) / h +
             ((3.0 * b * b - 1.0) * mb - (3.0 * a * a - 1.0) * ma) * h / 6.0;
    case 2:
      return a * ma + b * mb;
    default:
      fail(Errc::invalid_argument, "derivative order must be 0, 1 or 2");
  }
}

// ---------------------------------------------------------------------------
// Segment shape functions

double SegmentBasis::phi(const TrapGeometry& geom, std::size_t i, double z,
                         int order) const {
  if (tabulated()) {
    require(i < columns.size(), Errc::invalid_argument,
            "segment index out of range");
    return columns[i].eval(z, order);
  }
  // Analytic lobe: difference of smoothed steps across the segment span,
  // axial smoothing width tied to the transverse trap scale.
  const double w = geom.smoothing_width();
  const double k2 = 0.5 * geom.segment_length;
  const double zi = (static_cast<double>(i) - 0.5 * (geom.segment_count - 1)) *
                    geom.pitch();
  const double up = (z - zi + k2) / w, um = (z - zi - k2) / w;
  const double tp = std::tanh(up), tm = std::tanh(um);
  switch (order) {
    case 0:
      return 0.5 * (tp - tm);
    case 1:
      return 0.5 * ((1.0 - tp * tp) - (1.0 - tm * tm)) / w;
    case 2:
      return (tm * (1.0 - tm * tm) - tp * (1.0 - tp * tp)) / (w * w);
    default:
      fail(Errc::invalid_argument, "derivative order must be 0, 1 or 2");
  }
}

// ---------------------------------------------------------------------------
// AxialPotential

namespace {

void validate_variant(const AxialPotential::Variant& v) {
  if (const auto* g = std::get_if<GlobalHarmonic>(&v)) {
    require(g->nu1 > 0, Errc::invalid_argument,
            "global harmonic frequency must be positive");
  } else if (const auto* iw = std::get_if<IndividualWells>(&v)) {
    require(!iw->wells.empty(), Errc::invalid_argument,
            "individual-wells model needs at least one well");
    for (std::size_t i = 0; i < iw->wells.size(); ++i) {
      require(iw->wells[i].omega > 0, Errc::invalid_argument,
              "well frequency must be positive");
      if (i > 0)
        require(iw->wells[i].center > iw->wells[i - 1].center,
                Errc::invalid_argument,
                "well centers must be strictly increasing");
    }
  } else if (const auto* sp = std::get_if<Superposed>(&v)) {
    require(!sp->parts.empty(), Errc::invalid_argument,
            "superposition needs at least one part");
  } else if (const auto* sv = std::get_if<SegmentedVoltages>(&v)) {
    sv->geometry.validate();
    require(sv->voltages.size() == sv->basis.count(sv->geometry),
            Errc::invalid_argument,
            "voltage count must match segment count");
    for (double volt : sv->voltages)
      require(std::isfinite(volt), Errc::invalid_argument,
              "voltages must be finite");
  }
}

}  // namespace

AxialPotential::AxialPotential(Variant v) : v_(std::move(v)) {
  validate_variant(v_);
}

double AxialPotential::evaluate(const IonSpecies& species, double z,
                                int order) const {
  require(order >= 0 && order <= 2, Errc::invalid_argument,
          "derivative order must be 0, 1 or 2");
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GlobalHarmonic>) {
          const double k = species.mass * p.nu1 * p.nu1;
          const double d = z - p.center;
          if (order == 0) return 0.5 * k * d * d;
          if (order == 1) return k * d;
          return k;
        } else if constexpr (std::is_same_v<T, IndividualWells>) {
          // Lower envelope: evaluate the branch whose parabola is lowest.
          std::size_t best = 0;
          double best_u = std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < p.wells.size(); ++i) {
            const double d = z - p.wells[i].center;
            const double u =
                0.5 * species.mass * p.wells[i].omega * p.wells[i].omega * d * d;
            if (u < best_u) {
              best_u = u;
              best = i;
            }
          }
          const auto& w = p.wells[best];
          const double k = species.mass * w.omega * w.omega;
          const double d = z - w.center;
          if (order == 0) return best_u;
          if (order == 1) return k * d;
          return k;
        } else if constexpr (std::is_same_v<T, Superposed>) {
          double sum = 0.0;
          for (const auto& part : p.parts)
            sum += part.evaluate(species, z, order);
          return sum;
        } else {
          static_assert(std::is_same_v<T, SegmentedVoltages>);
          double sum = 0.0;
          for (std::size_t i = 0; i < p.voltages.size(); ++i)
            sum += p.voltages[i] * p.basis.phi(p.geometry, i, z, order);
          return species.charge * sum;
        }
      },
      v_);
}

std::string AxialPotential::describe() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GlobalHarmonic>) {
          os << "harmonic(" << rad_to_hz(p.nu1) * 1e-3 << " kHz @ "
             << p.center * 1e6 << " um)";
        } else if constexpr (std::is_same_v<T, IndividualWells>) {
          os << "wells[";
          for (std::size_t i = 0; i < p.wells.size(); ++i) {
            if (i) os << ", ";
            os << rad_to_hz(p.wells[i].omega) * 1e-3 << " kHz @ "
               << p.wells[i].center * 1e6 << " um";
          }
          os << "]";
        } else if constexpr (std::is_same_v<T, Superposed>) {
          os << "superposed(";
          for (std::size_t i = 0; i < p.parts.size(); ++i) {
            if (i) os << " + ";
            os << p.parts[i].describe();
          }
          os << ")";
        } else {
          static_assert(std::is_same_v<T, SegmentedVoltages>);
          os << "segmented(" << p.voltages.size() << " electrodes, "
             << (p.basis.tabulated() ? "tabulated" : "analytic") << " basis)";
        }
      },
      v_);
  return os.str();
}

// ---------------------------------------------------------------------------
// Harmonic fitting and well finding

WellFit fit_harmonic(const AxialPotential& pot, const IonSpecies& species,
                     double center, double window) {
  require(window > 0, Errc::invalid_argument, "fit window must be positive");
  constexpr int kSamples = 41;
  // Fit in the normalized coordinate t = (z - center) / window so the design
  // matrix is well conditioned regardless of the window's physical scale.
  Eigen::MatrixXd design(kSamples, 3);
  Eigen::VectorXd val(kSamples);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int j = 0; j < kSamples; ++j) {
    const double t = 2.0 * j / (kSamples - 1) - 1.0;
    const double u = pot.evaluate(species, center + window * t, 0);
    require(std::isfinite(u), Errc::range, "non-finite potential value");
    design(j, 0) = t * t;
    design(j, 1) = t;
    design(j, 2) = 1.0;
    val(j) = u;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(val);
  const double a = coef(0) / (window * window), b = coef(1) / window;
  const double spread = hi - lo;
  require(a > 0, Errc::not_a_well, "fitted curvature is not positive");
  require(a * window * window > 1e-6 * spread, Errc::not_a_well,
          "fitted curvature degenerate within tolerance");

  WellFit fit;
  fit.center = center - b / (2.0 * a);
  fit.frequency = std::sqrt(2.0 * a / species.mass);
  fit.fit_window = window;
  double ss = 0.0;
  for (int j = 0; j < kSamples; ++j) {
    const double r = val(j) - (design.row(j) * coef)(0);
    ss += r * r;
  }
  fit.fit_residual = std::sqrt(ss / kSamples) / spread;
  return fit;
}

std::vector<WellFit> find_wells(const AxialPotential& pot,
                                const IonSpecies& species, double z_lo,
                                double z_hi, double grid_step,
                                double fit_window) {
  require(z_hi > z_lo, Errc::invalid_argument, "empty scan range");
  require(grid_step > 0, Errc::invalid_argument, "grid step must be positive");

  const auto u = [&](double z) { return pot.evaluate(species, z, 0); };
  const std::size_t n =
      static_cast<std::size_t>(std::ceil((z_hi - z_lo) / grid_step)) + 1;
  std::vector<double> zs(n), us(n);
  for (std::size_t i = 0; i < n; ++i) {
    zs[i] = std::min(z_lo + static_cast<double>(i) * grid_step, z_hi);
    us[i] = u(zs[i]);
    require(std::isfinite(us[i]), Errc::range, "non-finite potential value");
  }

  std::vector<double> minima;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (us[i] < us[i - 1] && us[i] <= us[i + 1]) {
      const double z = golden_section_min(u, zs[i - 1], zs[i + 1], 1e-12);
      // Deduplicate refinements that converged to the same basin.
      if (!minima.empty() && z - minima.back() < 0.5 * grid_step) {
        if (u(z) < u(minima.back())) minima.back() = z;
      } else {
        minima.push_back(z);
      }
    }
  }

  std::vector<WellFit> fits;
  for (std::size_t i = 0; i < minima.size(); ++i) {
    const double z = minima[i];
    const double grad = std::abs(pot.evaluate(species, z, 1));
    const double curv = std::abs(pot.evaluate(species, z, 2));
    if (grad > std::max(curv * 1e-9, 1e-18)) continue;  // kink, not a smooth well
    double window = fit_window;
    if (i > 0) window = std::min(window, 0.45 * (z - minima[i - 1]));
    if (i + 1 < minima.size())
      window = std::min(window, 0.45 * (minima[i + 1] - z));
    window = std::min(window, 0.45 * std::min(z - z_lo, z_hi - z));
    window = std::max(window, grid_step);
    try {
      fits.push_back(fit_harmonic(pot, species, z, window));
      fits.back().center = z;  // keep the refined minimum, not the refit
    } catch (const Error& e) {
      if (e.code() != Errc::not_a_well) throw;  // plateaus are skipped
    }
  }
  std::sort(fits.begin(), fits.end(),
            [](const WellFit& a, const WellFit& b) { return a.center < b.center; });
  return fits;
}

// ---------------------------------------------------------------------------
// Basis-table ingestion

namespace {

double parse_number(std::string_view tok) {
  double out = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  require(ec == std::errc() && ptr == last, Errc::parse,
          "invalid numeric field '" + std::string(tok) + "'");
  return out;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    std::string_view tok = line.substr(
        start, comma == std::string_view::npos ? line.size() - start
                                               : comma - start);
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t'))
      tok.remove_prefix(1);
    while (!tok.empty() &&
           (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r'))
      tok.remove_suffix(1);
    out.push_back(tok);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

SegmentBasis load_basis_functions(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::parse,
          "empty basis table");
  const auto header = split_csv_line(line);
  require(header.size() >= 2 && header[0] == "z_m", Errc::parse,
          "basis table header must start with z_m and one seg_<i>_V column");
  for (std::size_t i = 1; i < header.size(); ++i)
    require(header[i].starts_with("seg_") && header[i].ends_with("_V"),
            Errc::parse, "basis column names must look like seg_<i>_V");

  const std::size_t ncol = header.size();
  std::vector<double> grid;
  std::vector<std::vector<double>> cols(ncol - 1);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto toks = split_csv_line(line);
    require(toks.size() == ncol, Errc::parse,
            "ragged basis table row (expected " + std::to_string(ncol) +
                " fields)");
    grid.push_back(parse_number(toks[0]));
    if (grid.size() > 1)
      require(grid.back() > grid[grid.size() - 2], Errc::parse,
              "basis z-grid must be strictly increasing");
    for (std::size_t c = 1; c < ncol; ++c)
      cols[c - 1].push_back(parse_number(toks[c]));
  }
  require(grid.size() >= 2, Errc::parse, "basis table needs at least two rows");

  SegmentBasis basis;
  basis.columns.reserve(cols.size());
  for (auto& col : cols)
    basis.columns.push_back(CubicSpline::build(grid, std::move(col)));
  return basis;
}

}  // namespace ionweave
