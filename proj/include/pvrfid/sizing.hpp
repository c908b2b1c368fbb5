#pragma once

// Design-space exploration over discrete component grids.

#include <algorithm>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "pvrfid/csv.hpp"
#include "pvrfid/error.hpp"
#include "pvrfid/simulator.hpp"

namespace pvrfid {

namespace detail {

inline void require_grid(const std::vector<double>& g, const char* name) {
  require(!g.empty(), ErrorKind::validation, std::string(name) + " grid is empty");
  for (std::size_t k = 1; k < g.size(); ++k)
    require(g[k] > g[k - 1], ErrorKind::validation,
            std::string(name) + " grid must be strictly increasing");
}

// Runs fn(i) for i in [0, n) concurrently; results land by index so the
// outcome does not depend on scheduling.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, Fn fn) {
  std::vector<std::future<T>> futures;
  futures.reserve(n);
  for (std::size_t i = 0; i < n; ++i) futures.push_back(std::async(std::launch::async, fn, i));
  std::vector<T> out;
  out.reserve(n);
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

}  // namespace detail

struct PersistenceTable {
  std::vector<double> capacitances;  // F, rows
  std::vector<double> leaks;         // A, columns
  std::vector<std::vector<double>> energy_balance;
  std::vector<std::vector<double>> trace_fraction;
};

// Availability for every (capacitance, constant leak) pair. The template's
// duration must be one day; its initial voltage is kept for every cell.
inline PersistenceTable persistence_sweep(const std::vector<double>& cap_grid,
                                          const std::vector<double>& leak_grid,
                                          const Scenario& templ) {
  detail::require_grid(cap_grid, "capacitance");
  detail::require_grid(leak_grid, "leak");
  detail::require(leak_grid.front() >= 0.0, ErrorKind::validation, "leaks must be >= 0");

  using Row = std::pair<std::vector<double>, std::vector<double>>;
  auto rows = detail::parallel_map<Row>(cap_grid.size(), [&](std::size_t i) {
    Row row;
    for (double leak : leak_grid) {
      Scenario s = templ;
      s.cap.capacitance = cap_grid[i];
      s.cap.leak = constant_leak(leak);
      const auto r = availability(s);
      row.first.push_back(r.energy_balance);
      row.second.push_back(r.trace_fraction);
    }
    return row;
  });

  PersistenceTable t{cap_grid, leak_grid, {}, {}};
  for (auto& r : rows) {
    t.energy_balance.push_back(std::move(r.first));
    t.trace_fraction.push_back(std::move(r.second));
  }
  return t;
}

inline std::string format_persistence_csv(const PersistenceTable& t,
                                          const std::vector<std::vector<double>>& values) {
  std::string out = "capacitance_F";
  for (double leak : t.leaks) out += ",leak_" + format_sig6(leak * 1e6) + "uA";
  out += '\n';
  for (std::size_t i = 0; i < t.capacitances.size(); ++i) {
    out += format_sig6(t.capacitances[i]);
    for (double v : values[i]) out += "," + format_sig6(v);
    out += '\n';
  }
  return out;
}

enum class AvailabilityMethod { trace, energy_balance };

struct SizingRequest {
  double target_availability = 1.0;
  LightProfile light;
  MeasurementSchedule schedule;
  ICProfile ic;
  std::vector<double> area_grid;  // cm^2
  std::vector<double> cap_grid;   // F
  LeakModel leak;
  DiodeModel base_cell;  // rescaled to each grid area
  double photocurrent_scale = 1.0;
  double v_max = 3.0;               // V, capacitor rating
  std::optional<double> initial_v;  // V, defaults to v_max (full charge)
  double dt = 1.0;                  // s
  AvailabilityMethod method = AvailabilityMethod::trace;
  // Both zero: lexicographic (area, then capacitance).
  double cost_per_cm2 = 0.0;
  double cost_per_farad = 0.0;
};

struct SizingResult {
  double area = 0.0;         // cm^2
  double capacitance = 0.0;  // F
  double availability = 0.0;
};

inline void validate(const SizingRequest& r) {
  detail::require(r.target_availability > 0.0 && r.target_availability <= 1.0,
                  ErrorKind::validation, "target availability must lie in (0, 1]");
  detail::require_grid(r.area_grid, "area");
  detail::require_grid(r.cap_grid, "capacitance");
  detail::require(r.area_grid.front() > 0.0 && r.cap_grid.front() > 0.0, ErrorKind::validation,
                  "grid values must be > 0");
  detail::require(r.cost_per_cm2 >= 0.0 && r.cost_per_farad >= 0.0, ErrorKind::validation,
                  "unit costs must be >= 0");
}

// Same cell, photocurrent scaled to the requested active area.
inline DiodeModel scale_to_area(const DiodeModel& cell, double area) {
  DiodeModel m = cell;
  m.isc = cell.isc * area / cell.area;
  m.area = area;
  return m;
}

inline Scenario sizing_scenario(const SizingRequest& r, double area, double capacitance) {
  Scenario s;
  s.pv = scale_to_area(r.base_cell, area);
  s.photocurrent_scale = r.photocurrent_scale;
  s.cap = {capacitance, r.v_max, r.leak};
  s.ic = r.ic;
  s.schedule = r.schedule;
  s.light = r.light;
  s.duration = constants::seconds_per_day;
  s.dt = r.dt;
  s.initial_v = r.initial_v.value_or(r.v_max);
  return s;
}

inline double sizing_availability(const SizingRequest& r, double area, double capacitance) {
  const auto s = sizing_scenario(r, area, capacitance);
  if (r.method == AvailabilityMethod::energy_balance) return energy_balance(s).energy_balance;
  return trace_availability(simulate(s));
}

inline bool better(const SizingRequest& r, const SizingResult& a, const SizingResult& b) {
  if (r.cost_per_cm2 > 0.0 || r.cost_per_farad > 0.0) {
    const double ca = a.area * r.cost_per_cm2 + a.capacitance * r.cost_per_farad;
    const double cb = b.area * r.cost_per_cm2 + b.capacitance * r.cost_per_farad;
    if (ca != cb) return ca < cb;
  }
  if (a.area != b.area) return a.area < b.area;
  return a.capacitance < b.capacitance;
}

// Availability is nondecreasing in PV area, so each capacitance gets a
// bisection for its smallest feasible area; capacitances are scanned fully.
inline std::optional<SizingResult> size_system(const SizingRequest& req) {
  validate(req);
  const auto& areas = req.area_grid;
  auto per_cap = detail::parallel_map<std::optional<SizingResult>>(
      req.cap_grid.size(), [&](std::size_t j) -> std::optional<SizingResult> {
        const double c = req.cap_grid[j];
        const double top = sizing_availability(req, areas.back(), c);
        if (top < req.target_availability) return std::nullopt;
        std::size_t lo = 0;
        std::size_t hi = areas.size() - 1;  // feasible
        double hi_avail = top;
        while (lo < hi) {
          const std::size_t mid = lo + (hi - lo) / 2;
          const double a = sizing_availability(req, areas[mid], c);
          if (a >= req.target_availability) {
            hi = mid;
            hi_avail = a;
          } else {
            lo = mid + 1;
          }
        }
        return SizingResult{areas[hi], c, hi_avail};
      });

  std::optional<SizingResult> best;
  for (const auto& cand : per_cap)
    if (cand && (!best || better(req, *cand, *best))) best = cand;
  return best;
}

inline std::string format_sizing_block(const std::optional<SizingResult>& r) {
  if (!r) return "feasible=0\n";
  return "feasible=1\narea_cm2=" + format_sig6(r->area) +
         "\ncapacitance_F=" + format_sig6(r->capacitance) +
         "\navailability=" + format_sig6(r->availability) + "\n";
}

}  // namespace pvrfid
