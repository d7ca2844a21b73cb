#include "doctest.h"

#include <cmath>

#include "tcsim/core/errors.hpp"
#include "tcsim/oscillator/diagnostics.hpp"

using namespace tcsim;
using namespace tcsim::oscillator;

namespace {

PhaseState snapshot(std::vector<double> q) {
  std::vector<double> p(q.size(), 0.0);
  return {std::move(q), std::move(p), 0.0};
}

// Period-doubled chain used for the thermal checks.
DriveParams locked_drive() { return {1.0, 0.5, 2.0, 1.0}; }
ChainParams locked_chain() { return {32, -0.05, Boundary::periodic}; }

double wall_density(double temperature, std::uint64_t seed) {
  const auto d = locked_drive();
  const auto c = locked_chain();
  core::RandomSource rng(seed);
  const double a = std::sqrt(2.0 * resonant_action_estimate(d));
  const auto traj = integrate_chain_langevin(d, c, {0.1, temperature}, PhaseState::uniform(32, a, 0.0), 3000, rng);
  const auto even = traj.record.even_periods();
  return domain_wall_extract(even, c.boundary, Binarization::angle_sign, d.omega_d).mean_density();
}

}  // namespace

TEST_CASE("domain walls of simple configurations") {
  const std::vector<PhaseState> up{snapshot({0.3, 0.1, 0.2, 0.5})};
  CHECK(domain_wall_extract(up, Boundary::periodic).counts[0] == 0);

  const std::vector<PhaseState> halves{snapshot({1, 1, 1, -1, -1, -1})};
  const auto ring = domain_wall_extract(halves, Boundary::periodic);
  CHECK(ring.counts[0] == 2);
  CHECK(ring.walls[0] == std::vector<int>{2, 5});
  CHECK(domain_wall_extract(halves, Boundary::open).counts[0] == 1);
  CHECK(ring.mean_density() == doctest::Approx(2.0 / 6.0));

  const std::vector<PhaseState> zero{snapshot({0.0, 1.0, -0.0})};
  CHECK(domain_wall_extract(zero, Boundary::periodic).spins[0] == std::vector<int>{1, 1, 1});
  CHECK_THROWS_AS(domain_wall_extract(std::vector<PhaseState>{}, Boundary::open), PreconditionError);
}

TEST_CASE("angle binarization reads the rotating-frame phase") {
  // At t = 0, sin Q = -p / sqrt(q^2 + p^2).
  PhaseState s{{0.1, 0.1, 0.0}, {0.5, -0.5, 0.0}, 0.0};
  const auto w = domain_wall_extract(std::vector<PhaseState>{s}, Boundary::open, Binarization::angle_sign);
  CHECK(w.spins[0] == std::vector<int>{-1, 1, 1});
}

TEST_CASE("synthetic alternating decay gives its lifetime") {
  std::vector<double> c;
  for (int n = 0; n <= 200; ++n) c.push_back((n % 2 ? -1.0 : 1.0) * 2.5 * std::exp(-n / 30.0));
  const auto r = ttsb_autocorrelation(std::span<const double>(c));
  REQUIRE(r.fit.has("tau"));
  CHECK(std::abs(r.fit.param("tau") - 30.0) < 1e-6);
  CHECK(r.envelope[1] == doctest::Approx(std::exp(-1.0 / 30.0)));
}

TEST_CASE("autocorrelation preconditions and degenerate envelopes") {
  std::vector<double> short_record(20, 1.0);
  CHECK_THROWS_AS(ttsb_autocorrelation(std::span<const double>(short_record)), PreconditionError);
  std::vector<double> negative(30, -1.0);
  CHECK_THROWS_AS(ttsb_autocorrelation(std::span<const double>(negative)), PreconditionError);

  // Not alternating: the envelope flips sign at n = 1 and no lifetime is fitted.
  std::vector<double> flat(40, 1.0);
  const auto r = ttsb_autocorrelation(std::span<const double>(flat));
  CHECK_FALSE(r.fit.has("tau"));
  CHECK_FALSE(r.fit.warnings.empty());
}

TEST_CASE("locked dissipative chain has a divergent lifetime") {
  const auto d = locked_drive();
  const auto c = locked_chain();
  core::RandomSource rng(5);
  const double a = std::sqrt(2.0 * resonant_action_estimate(d));
  ChainIntegrator it(d, c, PhaseState::uniform(32, a, 0.0), {}, {0.1, 0.0}, &rng);
  for (int n = 0; n < 200; ++n) it.advance_period();
  StroboscopicRecord record{d.period(), {it.state()}};
  for (int n = 0; n < 200; ++n) {
    it.advance_period();
    record.samples.push_back(it.state());
  }
  const auto r = ttsb_autocorrelation(std::span<const StroboscopicRecord>(&record, 1));
  CHECK(r.fit.divergent);
  CHECK_FALSE(r.fit.has("tau"));
  CHECK(domain_wall_extract(record.even_periods(), c.boundary).mean_density() == 0.0);
}

TEST_CASE("colder chains carry fewer domain walls") {
  double warm = 0.0, cold = 0.0;
  for (std::uint64_t seed : {1, 2, 3}) {
    warm += wall_density(0.037, seed);
    cold += wall_density(0.028, seed);
  }
  CHECK(cold < warm);
  CHECK(warm > 0.0);
}

TEST_CASE("colder chains keep their phase longer") {
  ArrheniusSetup setup;
  setup.drive = locked_drive();
  setup.chain = locked_chain();
  setup.initial = PhaseState::uniform(32, std::sqrt(2.0 * resonant_action_estimate(setup.drive)), 0.0);
  setup.record_periods = 2000;
  setup.max_lag = 500;
  setup.seeds = {11, 12, 13, 14};
  const std::vector<double> temps{0.031, 0.037, 0.045};
  const auto scan = arrhenius_scan(temps, setup);
  REQUIRE(scan.lifetimes[0].has_value());
  REQUIRE(scan.lifetimes[1].has_value());
  CHECK(*scan.lifetimes[0] > *scan.lifetimes[1]);
}

TEST_CASE("Arrhenius bookkeeping with an injected lifetime") {
  const std::vector<double> temps{0.2, 0.25, 0.4, 0.5};
  const auto scan = arrhenius_scan(temps, [](double t) {
    core::FitResult f;
    f.params["tau"] = std::exp(2.0 / t);
    return f;
  });
  CHECK(scan.fit.param("Delta") == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(scan.fit.param("ln_A")) < 1e-10);
  CHECK(scan.fit.r_squared == doctest::Approx(1.0));

  // A divergent point is dropped with a warning.
  const auto partial = arrhenius_scan(temps, [](double t) {
    core::FitResult f;
    if (t < 0.21) {
      f.divergent = true;
    } else {
      f.params["tau"] = std::exp(2.0 / t);
    }
    return f;
  });
  CHECK_FALSE(partial.lifetimes[0].has_value());
  CHECK(partial.fit.param("Delta") == doctest::Approx(2.0));
  CHECK(partial.fit.warnings.size() == 1);

  const std::vector<double> one{0.3};
  CHECK_THROWS_AS(arrhenius_scan(one, [](double) { return core::FitResult{}; }), PreconditionError);
  const std::vector<double> two{0.3, 0.4};
  CHECK_THROWS_AS(arrhenius_scan(two, [](double) { return core::FitResult{}; }), PreconditionError);
}

TEST_CASE("undriven pendulum never heats") {
  const DriveParams d{1.0, 0.0, 2.0, 1.0};
  const std::vector<double> grid{3.0, 5.0};
  const auto points = heating_time(d, {}, PhaseState::uniform(1, 1.0, 0.0), grid, {.max_time = 2000});
  for (const auto& p : points) {
    CHECK(p.censored());
    CHECK(p.plateau_energy == doctest::Approx(p.initial_energy).epsilon(1e-4));
  }
  CHECK_THROWS_AS(heating_time({1.0, 0.5, 2.0, 0.0}, {}, PhaseState::uniform(1, 1.0, 0.0), grid), PreconditionError);
}

TEST_CASE("strong drive below the chaos border heats quickly") {
  // delta = 4, q = 1: chaotic at omega_d = 3.5, regular at 4.3.
  const DriveParams d{1.0, 4.0, 2.0, 1.0};
  const std::vector<double> grid{3.5, 4.3};
  const auto points = heating_time(d, {}, PhaseState::uniform(1, 1.0, 0.0), grid, {.max_time = 5000});
  REQUIRE_FALSE(points[0].censored());
  CHECK(*points[0].t_star < 50.0);
  CHECK(points[0].plateau_energy > 10.0 * points[0].initial_energy);
  CHECK(points[1].censored());
  CHECK(points[1].energy.size() == static_cast<std::size_t>(std::ceil(5000 / (2 * M_PI / 4.3))) + 1);
}
