#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "fuelcalc/errors.hpp"
#include "fuelcalc/monotone.hpp"
#include "fuelcalc/trajectory.hpp"

namespace fuelcalc {

struct GridSpec {
  double cell_deg = 0.33;          // horizontal resolution, degrees
  double layer_m = 1000.0;         // altitude layer thickness, meters
  double emission_factor = 3.16;   // kg CO2 per kg fuel (standard jet-fuel value)

  bool operator==(const GridSpec& o) const {
    return cell_deg == o.cell_deg && layer_m == o.layer_m &&
           emission_factor == o.emission_factor;
  }
};

struct CellIndex {
  int lat = 0;
  int lon = 0;
  int layer = 0;
  auto operator<=>(const CellIndex&) const = default;
};

namespace detail {

// Order-insensitive accumulation: a double-double running sum keeps ~106
// bits, so gridding at two resolutions and re-aggregating yields identical
// doubles.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  void add(double x) {
    double s = hi + x;
    double bb = s - hi;
    double err = (hi - (s - bb)) + (x - bb);
    double lo2 = lo + err;
    hi = s + lo2;
    lo = lo2 - (hi - s);
  }
  void add(const DoubleDouble& o) {
    add(o.hi);
    add(o.lo);
  }
  double value() const { return hi + lo; }
};

inline int floor_div2(int x) { return x >= 0 ? x / 2 : -((-x + 1) / 2); }

}  // namespace detail

class EmissionGrid {
public:
  explicit EmissionGrid(const GridSpec& spec = {}) : spec_(spec) {
    if (!(spec.cell_deg > 0.0) || !(spec.layer_m > 0.0) || !(spec.emission_factor > 0.0)) {
      throw InvalidArgument("grid spec fields must be positive");
    }
  }

  const GridSpec& spec() const { return spec_; }

  CellIndex cell_of(double lat, double lon, double alt) const {
    CellIndex c;
    c.lat = static_cast<int>(std::floor(lat / spec_.cell_deg));
    c.lon = static_cast<int>(std::floor(lon / spec_.cell_deg));
    c.layer = alt < 0.0 ? 0 : static_cast<int>(std::floor(alt / spec_.layer_m));
    return c;
  }

  void deposit(const CellIndex& cell, double mass_kg) { cells_[cell].add(mass_kg); }

  double mass(const CellIndex& cell) const {
    auto it = cells_.find(cell);
    return it == cells_.end() ? 0.0 : it->second.value();
  }

  double total_mass() const {
    detail::DoubleDouble sum;
    for (const auto& [cell, m] : cells_) sum.add(m);
    return sum.value();
  }

  std::size_t cell_count() const { return cells_.size(); }

  const std::map<CellIndex, detail::DoubleDouble>& raw() const { return cells_; }

  void merge_from(const EmissionGrid& other) {
    if (!(spec_ == other.spec_)) throw SpecMismatch("cannot merge grids with different specs");
    for (const auto& [cell, m] : other.cells_) cells_[cell].add(m);
  }

private:
  GridSpec spec_;
  std::map<CellIndex, detail::DoubleDouble> cells_;
};

// Integrates the flow curve over 1-second sub-steps and deposits each
// sub-step's fuel mass (times the emission factor) into the cell holding the
// sub-step midpoint. Sub-step fuel is the exact cumulative difference, so
// the grid total telescopes to factor * (Q_end - Q_start).
inline EmissionGrid grid_flight(const FlightTrack& track, const MonotoneCurve& flow,
                                const GridSpec& spec, double substep = 1.0) {
  const double span = track.duration();
  const double slack = 1e-6 * std::max(1.0, span);
  if (flow.t_min() > slack || flow.t_max() < span - slack) {
    throw SpanMismatch("flow curve [" + std::to_string(flow.t_min()) + ", " +
                       std::to_string(flow.t_max()) + "] does not span the track (" +
                       std::to_string(span) + " s)");
  }
  EmissionGrid grid(spec);
  const double start = track.start_time();
  const double t_end = std::min(span, flow.t_max());
  double t = flow.t_min();
  double q_prev = flow.value(t);
  while (t < t_end) {
    const double t_next = std::min(t + substep, t_end);
    const double q_next = flow.value(t_next);
    const TrackPoint p = eval_position(track, start + 0.5 * (t + t_next));
    grid.deposit(grid.cell_of(p.lat, p.lon, p.alt), (q_next - q_prev) * spec.emission_factor);
    t = t_next;
    q_prev = q_next;
  }
  return grid;
}

inline EmissionGrid merge(const std::vector<EmissionGrid>& grids) {
  if (grids.empty()) throw InvalidArgument("merge requires at least one grid");
  EmissionGrid out(grids.front().spec());
  for (const EmissionGrid& g : grids) out.merge_from(g);
  return out;
}

// Collapses 2x2 horizontal blocks of a half-resolution grid back onto the
// parent resolution. Layers are untouched.
inline EmissionGrid aggregate_half_cells(const EmissionGrid& fine) {
  GridSpec coarse_spec = fine.spec();
  coarse_spec.cell_deg *= 2.0;
  EmissionGrid out(coarse_spec);
  for (const auto& [cell, m] : fine.raw()) {
    CellIndex parent{detail::floor_div2(cell.lat), detail::floor_div2(cell.lon), cell.layer};
    out.deposit(parent, m.hi);
    out.deposit(parent, m.lo);
  }
  return out;
}

inline void export_csv(const EmissionGrid& grid, std::ostream& out) {
  out << "lat_idx,lon_idx,layer_idx,lat_min,lon_min,alt_min,co2_kg\n";
  char buf[160];
  for (const auto& [cell, m] : grid.raw()) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.10g,%.10g,%.10g,%.17g\n", cell.lat, cell.lon,
                  cell.layer, cell.lat * grid.spec().cell_deg, cell.lon * grid.spec().cell_deg,
                  cell.layer * grid.spec().layer_m, m.value());
    out << buf;
  }
}

inline EmissionGrid import_csv(std::istream& in, const GridSpec& spec) {
  EmissionGrid grid(spec);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    CellIndex cell;
    double lat_min = 0, lon_min = 0, alt_min = 0, mass = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%d,%lf,%lf,%lf,%lf", &cell.lat, &cell.lon, &cell.layer,
                    &lat_min, &lon_min, &alt_min, &mass) != 7) {
      throw MalformedRecord("line " + std::to_string(line_no) + ": bad grid row");
    }
    grid.deposit(cell, mass);
  }
  return grid;
}

}  // namespace fuelcalc
