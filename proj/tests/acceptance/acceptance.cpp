// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "pvrfid/pvrfid.hpp"
#include "scenarios.hpp"

using namespace pvrfid;
using namespace pvrfid::testing;

namespace {

int failures = 0;

void report(const char* id, bool ok, const std::string& what) {
  std::printf("%s [%s] %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within_rel(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

void criterion_1() {
  const double ratio = range_ratio(-8.3, -22.0);
  const auto cfg = calibrate_tau(LinkConfig{}, -8.3, 0.8);
  const double passive = read_range(cfg, -8.3);
  const double assisted = read_range(cfg, -22.0);
  const bool ok = std::abs(ratio - 4.84) <= 0.01 && std::abs(passive - 0.8) <= 1e-9 &&
                  std::abs(assisted - 3.87) <= 0.01 && assisted >= 3.1 && assisted <= 4.9;
  report("1", ok,
         fmt("range ratio %.4f (want 4.84 +/- 0.01); calibrated passive %.4f m -> assisted %.4f m "
             "(want 3.87, around 4 m)",
             ratio, passive, assisted));
}

void criterion_2() {
  const double r = fit_leak_resistance(1.0, 3.0, {{5000.0, 2.0}});
  auto s = decay_scenario();
  s.cap.leak = ResistiveLeak{r};
  const auto trace = simulate(s);
  const double v5 = voltage_at(trace, 5000.0);
  const double v8 = voltage_at(trace, 8000.0);
  const bool ok = std::abs(r - 12331.0) <= 1.0 && within_rel(v5, 2.0, 0.02) && within_rel(v8, 1.57, 0.02);
  report("2", ok,
         fmt("R %.3f ohm (want 12331 +/- 1); v(5000 s) %.4f V (want 2.00 +/- 2%%); v(8000 s) %.4f V "
             "(want 1.57 +/- 2%%; measured 1.5 V, residual %.1f%%)",
             r, v5, v8, 100.0 * (v8 - 1.5) / 1.5));
}

void criterion_3() {
  const auto trace = simulate(charge_scenario());
  const auto t15 = time_to_voltage(trace, 1.5);
  const auto t30 = time_to_voltage(trace, 3.0);
  report("3a", t15 && within_rel(*t15, 300.0, 0.05),
         fmt("5 mA calibration: time to 1.5 V %.1f s (want 300 s +/- 5%%)", t15 ? *t15 : -1.0));
  report("3b", t30 && within_rel(*t30, 3000.0, 0.20),
         fmt("time to 3 V %.1f s (want 3000 s +/- 20%%)", t30 ? *t30 : -1.0));
}

void criterion_4() {
  const double on = on_time_experiment(charge_scenario(), 2700.0) / 60.0;
  report("4", within_rel(on, 185.0, 0.10),
         fmt("45 min of light -> on for %.1f min (want 185 min +/- 10%%)", on));
}

void criterion_5() {
  const std::vector<double> caps{1e-6, 1e-3, 1.0, 100.0};
  const std::vector<double> leaks{0.0, 10e-6, 20e-6, 40e-6};
  const auto t = persistence_sweep(caps, leaks, persistence_scenario(1.0, 0.0));
  bool ok = true;
  for (const auto* m : {&t.energy_balance, &t.trace_fraction}) {
    ok = ok && (*m)[2][0] == 1.0;
    for (std::size_t i = 0; i < caps.size(); ++i)
      for (std::size_t j = 0; j < leaks.size(); ++j) {
        if (j > 0) ok = ok && (*m)[i][j] <= (*m)[i][j - 1];
        if (i > 0) ok = ok && (*m)[i][j] >= (*m)[i - 1][j];
      }
  }
  std::string rows;
  for (std::size_t i = 0; i < caps.size(); ++i) {
    rows += fmt(" C=%g:", caps[i]);
    for (std::size_t j = 0; j < leaks.size(); ++j) rows += fmt(" %.3g", t.energy_balance[i][j]);
  }
  report("5", ok,
         "availability 1.0 at (1 F, 0 uA); rows nonincreasing in leak, columns nondecreasing in C;" + rows);
}

void criterion_6() {
  const ICProfile p;
  const double i0 = average_current(p, 0.0);
  const double imax = average_current(p, max_rate(p));
  const double p20k = average_power(p, 20000.0, 1.5);
  double lo = INFINITY, hi = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double w = average_power(p, max_rate(p) * k / 1000.0, 1.5);
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  const bool exact = i0 == 6e-6 && imax == 30e-6;
  const bool formula = std::abs(p20k - 10.6e-6) <= 0.05e-6;
  const bool bracket = lo >= 10e-6 && hi <= 45e-6 * (1.0 + 1e-12);
  report("6a", exact && formula,
         fmt("I(0) %.3g A, I(max) %.3g A; P(20000/h, 1.5 V) %.2f uW by formula (quoted ~20 uW, "
             "discrepancy logged)",
             i0, imax, p20k * 1e6));
  report("6b", bracket,
         fmt("power curve at 1.5 V spans %.2f-%.2f uW (want inside 10-45 uW)", lo * 1e6, hi * 1e6));
}

void criterion_7() {
  const auto m = prototype_module();
  const double i0 = iv_current(m, 0.0);
  const double ivoc = iv_current(m, 4.3);
  const double pm = mpp(m).p;
  const double eta = efficiency_from_summary(3.7, 4.3, 0.6);
  const bool ok = std::abs(i0 - 3.922e-3) <= 1e-9 && std::abs(ivoc) <= 1e-9 &&
                  within_rel(pm, 10.12e-3, 0.005) && std::abs(eta - 0.0955) <= 5e-5;
  report("7", ok,
         fmt("I(0) %.9f mA, I(4.3 V) %.2e A, P_mpp %.4f mW (want 10.12 +/- 0.5%%); "
             "eta from Jsc*Voc*FF %.2f%% vs stated 10.1%%",
             i0 * 1e3, ivoc, pm * 1e3, eta * 100.0));
}

double energy_residual(const Scenario& s) {
  const auto trace = simulate(s);
  double flows = 0.0, throughput = 0.0;
  for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
    const auto& r = trace[k];
    flows += (r.p_in - r.p_load - r.p_leak) * s.dt;
    throughput += (r.p_in + r.p_load + r.p_leak) * s.dt;
  }
  const double de = stored_energy(s.cap.capacitance, trace.back().v) -
                    stored_energy(s.cap.capacitance, trace.front().v);
  return std::abs(flows - de) / std::max({std::abs(de), throughput, 1e-300});
}

std::optional<SizingResult> exhaustive(const SizingRequest& r) {
  std::optional<SizingResult> best;
  for (double a : r.area_grid)
    for (double c : r.cap_grid) {
      const double av = sizing_availability(r, a, c);
      if (av < r.target_availability) continue;
      const SizingResult cand{a, c, av};
      if (!best || better(r, cand, *best)) best = cand;
    }
  return best;
}

void criterion_8() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  double friis_err = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double d = 0.01 + 100.0 * u(rng);
    const double f = 850e6 + 100e6 * u(rng);
    const double drop = friis_received_power(36.0, 2.0, f, 2.0 * d) - friis_received_power(36.0, 2.0, f, d);
    friis_err = std::max(friis_err, std::abs(drop + 20.0 * std::log10(2.0)));
  }
  const bool friis = friis_err <= 1e-12 && std::abs(20.0 * std::log10(2.0) - 6.0206) < 5e-5;

  double energy = 0.0;
  for (int k = 0; k < 20; ++k) {
    Scenario s = charge_scenario(3600.0);
    s.photocurrent_scale *= u(rng);
    s.cap.capacitance = std::pow(10.0, -2.0 + 2.0 * u(rng));
    if (k % 2) s.cap.leak = ConstantLeak{30e-6 * u(rng) + 1e-7};
    s.light = constant_light(0.0, 3600.0 * u(rng), u(rng));
    s.initial_v = 3.0 * u(rng);
    s.dt = 0.5 + u(rng);
    energy = std::max(energy, energy_residual(s));
  }
  energy = std::max({energy, energy_residual(charge_scenario()), energy_residual(decay_scenario())});

  double fit = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double r = std::exp(std::log(1e3) + u(rng) * std::log(1e4));
    const double c = std::exp(std::log(1e-6) + u(rng) * std::log(1e8));
    std::vector<DecayPoint> pts;
    for (double x : {0.2, 0.7, 1.3}) pts.push_back({x * r * c, 3.0 * std::exp(-x)});
    fit = std::max(fit, std::abs(fit_leak_resistance(c, 3.0, pts) / r - 1.0));
  }

  int grids = 0, agree = 0;
  for (int k = 0; k < 12; ++k) {
    SizingRequest r;
    r.base_cell = prototype_module();
    r.dt = 30.0;
    r.method = k % 2 ? AvailabilityMethod::energy_balance : AvailabilityMethod::trace;
    r.target_availability = 0.3 + 0.7 * u(rng);
    const double start = 3600.0 * (4.0 + 4.0 * u(rng));
    r.light = constant_light(start, start + 3600.0 * (2.0 + 8.0 * u(rng)), 0.002 + 0.05 * u(rng));
    r.leak = constant_leak(k % 3 ? 0.0 : 20e-6 * u(rng));
    r.schedule.rate = 40000.0 * u(rng);
    r.initial_v = 3.0 * u(rng);
    double a = 0.01 + 0.05 * u(rng);
    for (int j = 0; j < 4; ++j) r.area_grid.push_back(a), a *= 2.0 + 3.0 * u(rng);
    double c = 1e-3 + 0.01 * u(rng);
    for (int j = 0; j < 4; ++j) r.cap_grid.push_back(c), c *= 3.0 + 10.0 * u(rng);
    if (k % 4 == 3) r.cost_per_cm2 = u(rng), r.cost_per_farad = u(rng);
    const auto got = size_system(r);
    const auto want = exhaustive(r);
    ++grids;
    if (got.has_value() == want.has_value() &&
        (!got || (got->area == want->area && got->capacitance == want->capacitance)))
      ++agree;
  }

  auto fine = charge_scenario();
  fine.dt = 0.5;
  const auto tc = simulate(charge_scenario());
  const auto tf = simulate(fine);
  double halving = 0.0;
  for (double v : {0.5, 1.5, 2.5, 3.0})
    halving = std::max(halving, std::abs(*time_to_voltage(tc, v) / *time_to_voltage(tf, v) - 1.0));

  const bool ok = friis && energy <= 1e-4 && fit <= 1e-3 && agree == grids && halving < 0.01;
  report("8", ok,
         fmt("Friis doubling error %.1e dB; energy residual %.1e; RC fit error %.1e; "
             "size_system = exhaustive on %d/%d 4x4 grids; dt-halving shift %.3f%%",
             friis_err, energy, fit, agree, grids, halving * 100.0));
}

}  // namespace

int main() {
  try {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
  } catch (const std::exception& e) {
    std::printf("FAIL [error] %s\n", e.what());
    return 1;
  }
  std::printf("%d criterion line(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
