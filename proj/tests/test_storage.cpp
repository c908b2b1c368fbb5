#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pvrfid/storage.hpp"

using namespace pvrfid;
using Catch::Approx;

TEST_CASE("stored and usable energy", "[storage]") {
  CHECK(stored_energy(1.0, 3.0) == 4.5);
  CHECK(stored_energy(1.0, 0.0) == 0.0);
  CHECK(stored_energy(1e-6, 3.0) == Approx(4.5e-6));
  CHECK(usable_energy(1.0, 3.0, 1.5) == Approx(3.375));
  CHECK(usable_energy(1.0, 3.0, 3.0) == 0.0);
  CHECK(usable_energy(2.0, 3.0, 1.5) == Approx(6.75));
  CHECK_THROWS_AS(usable_energy(1.0, 1.0, 2.0), Error);
}

TEST_CASE("leak currents", "[storage]") {
  const CapacitorModel constant{1.0, 3.0, ConstantLeak{40e-6}};
  CHECK(leak_current(constant, 0.3) == 40e-6);
  CHECK(leak_current(constant, 2.9) == 40e-6);
  const CapacitorModel rc{1.0, 3.0, ResistiveLeak{12331.517312}};
  CHECK(leak_current(rc, 3.0) == Approx(243.28e-6).epsilon(1e-4));
  CHECK(leak_current(rc, 0.0) == 0.0);
  CHECK(leak_current(CapacitorModel{}, 3.0) == 0.0);
  CHECK(std::holds_alternative<std::monostate>(constant_leak(0.0)));
}

TEST_CASE("capacitor validation", "[storage][errors]") {
  CHECK_THROWS_AS(validate(CapacitorModel{0.0, 3.0, {}}), Error);
  CHECK_THROWS_AS(validate(CapacitorModel{1.0, 0.0, {}}), Error);
  CHECK_THROWS_AS(validate(CapacitorModel{1.0, 3.0, ConstantLeak{0.0}}), Error);
  CHECK_THROWS_AS(validate(CapacitorModel{1.0, 3.0, ResistiveLeak{-1.0}}), Error);
  validate(CapacitorModel{1.0, 3.0, ResistiveLeak{1.0}});
}

TEST_CASE("euler step", "[storage]") {
  const CapacitorModel c{1.0, 3.0, {}};
  const auto s = step({0.0, 0.0}, c, 1e-3, 1.0);
  CHECK(s.v == Approx(1e-3));
  CHECK(s.t == 1.0);
  CHECK(step({3.0, 0.0}, c, 1e-3, 1.0).v == 3.0);
  CHECK(step({0.0, 0.0}, c, -1e-3, 1.0).v == 0.0);
  CHECK_THROWS_AS(step({0.0, 0.0}, c, 1e-3, 0.0), Error);
}

TEST_CASE("leak resistance fit", "[storage][fit]") {
  CHECK(fit_leak_resistance(1.0, 3.0, {{5000.0, 2.0}}) == Approx(12331.517312).margin(1e-5));
  // Two-point least squares through the origin; frozen from tests/oracles/oracles.py.
  const double r2 = fit_leak_resistance(1.0, 3.0, {{5000.0, 2.0}, {8000.0, 1.5}});
  CHECK(r2 == Approx(11753.049180).margin(1e-4));
  CHECK(3.0 * std::exp(-8000.0 / r2) == Approx(1.518826).margin(1e-6));

  CHECK_THROWS_AS(fit_leak_resistance(1.0, 3.0, {}), Error);
  try {
    fit_leak_resistance(1.0, 3.0, {{5000.0, 3.0}});
    FAIL("expected degenerate-points");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_points);
  }
  CHECK_THROWS_AS(fit_leak_resistance(1.0, 3.0, {{0.0, 2.0}}), Error);
  CHECK_THROWS_AS(fit_leak_resistance(1.0, 3.0, {{10.0, 0.0}}), Error);
}

TEST_CASE("property: fit round-trips synthetic RC decay", "[storage][fit][property]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> log_r(std::log(1e3), std::log(1e7));
  std::uniform_real_distribution<double> log_c(std::log(1e-6), std::log(100.0));
  for (int trial = 0; trial < 300; ++trial) {
    const double r = std::exp(log_r(rng));
    const double c = std::exp(log_c(rng));
    const double tau = r * c;
    std::vector<DecayPoint> pts;
    for (double frac : {0.1, 0.4, 0.9, 1.7}) pts.push_back({frac * tau, 3.0 * std::exp(-frac)});
    CHECK(fit_leak_resistance(c, 3.0, pts) == Approx(r).epsilon(1e-3));
  }
}

TEST_CASE("property: step stays within rails", "[storage][property]") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const CapacitorModel c{1e-3, 3.0, {}};
  ChargeState s{1.0, 0.0};
  for (int k = 0; k < 10000; ++k) {
    s = step(s, c, 5e-3 * u(rng), 0.5);
    REQUIRE(s.v >= 0.0);
    REQUIRE(s.v <= 3.0);
  }
}

TEST_CASE("property: step energy matches midpoint power", "[storage][property]") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const CapacitorModel c{0.1 + u(rng), 3.0, {}};
    const ChargeState s{0.5 + 2.0 * u(rng), 0.0};
    const double i = 1e-3 * (2.0 * u(rng) - 1.0);
    const double dt = 0.1 * u(rng) + 1e-3;
    const auto n = step(s, c, i, dt);
    const double de = stored_energy(c.capacitance, n.v) - stored_energy(c.capacitance, s.v);
    CHECK(de == Approx(0.5 * (s.v + n.v) * i * dt).epsilon(1e-6));
  }
}

TEST_CASE("property: stored energy increasing in v and linear in c", "[storage][property]") {
  for (double v = 0.0; v < 3.0; v += 0.01) {
    CHECK(stored_energy(1.0, v + 0.01) > stored_energy(1.0, v));
    CHECK(stored_energy(3.0, v) == Approx(3.0 * stored_energy(1.0, v)));
  }
}
