#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tcsim/core/errors.hpp"
#include "tcsim/oscillator/chain.hpp"

using namespace tcsim;
using namespace tcsim::oscillator;

namespace {

constexpr double kPi = std::numbers::pi;

PhaseState random_state(int sites, std::uint64_t seed, double scale = 0.5) {
  core::RandomSource rng(seed);
  auto s = PhaseState::uniform(sites, 0.0, 0.0);
  for (int i = 0; i < sites; ++i) {
    s.q[i] = rng.uniform(-scale, scale);
    s.p[i] = rng.uniform(-scale, scale);
  }
  return s;
}

// Independent RK4 oracle for one pendulum, fine steps.
std::pair<double, double> pendulum_oracle(const DriveParams& d, double q, double p, double t_end, int steps) {
  const double h = t_end / steps;
  auto acc = [&](double t, double x) { return -d.omega0 * d.omega0 * (1.0 + d.delta * std::cos(d.omega_d * t)) * x - d.kappa * x * x * x; };
  double t = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double k1q = p, k1p = acc(t, q);
    const double k2q = p + 0.5 * h * k1p, k2p = acc(t + 0.5 * h, q + 0.5 * h * k1q);
    const double k3q = p + 0.5 * h * k2p, k3p = acc(t + 0.5 * h, q + 0.5 * h * k2q);
    const double k4q = p + h * k3p, k4p = acc(t + h, q + h * k3q);
    q += h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
    p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    t += h;
  }
  return {q, p};
}

}  // namespace

TEST_CASE("harmonic oscillator conserves energy and follows cos t") {
  const DriveParams d{};  // omega0 = 1, no drive, no nonlinearity
  const ChainParams c{};
  const auto traj = integrate_chain_hamiltonian(d, c, PhaseState::uniform(1, 1.0, 0.0), 10000, {.substeps = 16384});
  REQUIRE_FALSE(traj.blew_up);
  double worst_energy = 0.0, worst_q = 0.0;
  for (std::size_t n = 0; n < traj.record.samples.size(); ++n) {
    const auto& s = traj.record.samples[n];
    worst_energy = std::max(worst_energy, std::abs(undriven_energy(d, c, s) - 0.5));
    worst_q = std::max(worst_q, std::abs(s.q[0] - std::cos(n * kPi)));
  }
  CHECK(worst_energy < 1e-8);
  // Verlet phase error t h^2 / 24 at t = 1e4 pi.
  CHECK(worst_q < 1e-4);
}

TEST_CASE("undriven anharmonic chain has no secular energy drift") {
  const DriveParams d{1.0, 0.0, 2.0, 1.0};
  const ChainParams c{6, -0.3, Boundary::periodic};
  const auto init = random_state(6, 11);
  ChainIntegrator it(d, c, init);
  const int periods = 100000 / 128;
  std::vector<double> e{undriven_energy(d, c, init)};
  for (int n = 0; n < periods; ++n) {
    REQUIRE(it.advance_period());
    e.push_back(undriven_energy(d, c, it.state()));
  }
  const std::size_t w = e.size() / 10;
  double head = 0.0, tail = 0.0;
  for (std::size_t n = 0; n < w; ++n) {
    head += e[n] / w;
    tail += e[e.size() - 1 - n] / w;
  }
  CHECK(std::abs(tail - head) / e[0] < 1e-6);
}

TEST_CASE("driven single pendulum matches an independent RK4 oracle") {
  const DriveParams d{1.0, 0.3, 2.0, 1.0};
  const auto traj = integrate_chain_hamiltonian(d, {}, PhaseState::uniform(1, 0.4, 0.1), 20, {.substeps = 4096});
  const auto [q, p] = pendulum_oracle(d, 0.4, 0.1, 20 * d.period(), 200000);
  CHECK(traj.record.samples.back().q[0] == doctest::Approx(q).epsilon(1e-5));
  CHECK(traj.record.samples.back().p[0] == doctest::Approx(p).epsilon(1e-5));
}

TEST_CASE("uniform initial condition reduces to a single pendulum") {
  const DriveParams d{1.0, 0.5, 2.0, 1.0};
  const auto single = integrate_chain_hamiltonian(d, {}, PhaseState::uniform(1, 0.7, 0.1), 300);
  for (int sites : {3, 8}) {
    const ChainParams c{sites, -0.3, Boundary::periodic};
    const auto chain = integrate_chain_hamiltonian(d, c, PhaseState::uniform(sites, 0.7, 0.1), 300);
    for (std::size_t n = 0; n < single.record.samples.size(); ++n)
      for (int i = 0; i < sites; ++i) {
        REQUIRE(chain.record.samples[n].q[i] == single.record.samples[n].q[0]);
        REQUIRE(chain.record.samples[n].p[i] == single.record.samples[n].p[0]);
      }
  }
}

TEST_CASE("velocity Verlet is time reversible") {
  const DriveParams d{1.0, 0.6, 2.0, 1.0};
  const ChainParams c{5, -0.2, Boundary::periodic};
  const auto init = random_state(5, 3, 0.8);
  // Chaotic drive: round-off grows by ~1e3 per 50 periods, so keep the run short.
  const int n = 50;
  auto forward = integrate_chain_hamiltonian(d, c, init, n).final_state;
  for (double& p : forward.p) p = -p;
  // Whole periods of an even drive: restarting the clock at t = 0 is exact.
  forward.t = 0.0;
  auto back = integrate_chain_hamiltonian(d, c, forward, n).final_state;
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(back.q[i] - init.q[i]) < 1e-9);
    CHECK(std::abs(-back.p[i] - init.p[i]) < 1e-9);
  }
}

TEST_CASE("Langevin integrator with no bath is the Hamiltonian integrator") {
  const DriveParams d{1.0, 0.4, 2.0, 0.5};
  const ChainParams c{7, -0.25, Boundary::open};
  const auto init = random_state(7, 9);
  core::RandomSource rng(1);
  const auto a = integrate_chain_hamiltonian(d, c, init, 200);
  const auto b = integrate_chain_langevin(d, c, {}, init, 200, rng);
  for (std::size_t n = 0; n < a.record.samples.size(); ++n) {
    REQUIRE(a.record.samples[n].q == b.record.samples[n].q);
    REQUIRE(a.record.samples[n].p == b.record.samples[n].p);
  }
  CHECK(rng.block_counter() == 0);
}

TEST_CASE("equipartition in a harmonic bath") {
  const DriveParams d{};
  const ChainParams c{16, 0.0, Boundary::periodic};
  const double temperature = 0.5;
  core::RandomSource rng(2024);
  ChainIntegrator it(d, c, PhaseState::uniform(16, 0.0, 0.0), {}, {1.0, temperature}, &rng);
  for (int n = 0; n < 200; ++n) it.advance_period();
  // Batch means over 64 batches of 1000 periods: 1.02e6 samples.
  std::vector<double> batches;
  for (int b = 0; b < 64; ++b) {
    double sum = 0.0;
    for (int n = 0; n < 1000; ++n) {
      it.advance_period();
      for (double p : it.state().p) sum += p * p;
    }
    batches.push_back(sum / (1000.0 * 16));
  }
  double mean = 0.0, var = 0.0;
  for (double x : batches) mean += x / batches.size();
  for (double x : batches) var += (x - mean) * (x - mean) / (batches.size() - 1);
  const double sigma = std::sqrt(var / batches.size());
  CHECK(std::abs(mean - temperature) < 3.0 * sigma);
  CHECK(sigma < 0.01 * temperature);
}

TEST_CASE("resonant pendulum settles on the period-doubled orbit") {
  const DriveParams d{1.0, 0.3, 2.0, 1.0};
  const double amplitude = std::sqrt(2.0 * resonant_action_estimate(d));
  CHECK(amplitude == doctest::Approx(std::sqrt(0.2)));

  // Weak friction relaxes onto the orbit; the closed system then stays on it.
  core::RandomSource rng(1);
  auto start = integrate_chain_langevin(d, {}, {0.002, 0.0}, PhaseState::uniform(1, amplitude, 0.0), 6000, rng).final_state;
  start.t = 0.0;
  auto mirror = start;
  mirror.q[0] = -start.q[0];
  mirror.p[0] = -start.p[0];
  const auto traj = integrate_chain_hamiltonian(d, {}, start, 400);
  const auto other = integrate_chain_hamiltonian(d, {}, mirror, 400);

  const double q0 = *rotating_frame(start, d.omega_d).angle[0];
  for (std::size_t n = 0; n < traj.record.samples.size(); ++n) {
    const auto& s = traj.record.samples[n];
    if (n > 0) {
      const auto& prev = traj.record.samples[n - 1];
      CHECK(std::abs(s.q[0] + prev.q[0]) < 0.05 * amplitude);
      CHECK(std::abs(s.p[0] + prev.p[0]) < 0.05 * amplitude);
    }
    const auto qa = rotating_frame(s, d.omega_d).angle[0];
    const auto qb = rotating_frame(other.record.samples[n], d.omega_d).angle[0];
    REQUIRE(qa.has_value());
    REQUIRE(qb.has_value());
    CHECK(std::abs(std::remainder(*qa - q0, 2.0 * kPi)) < 0.05);
    CHECK(std::abs(std::remainder(*qb - *qa - kPi, 2.0 * kPi)) < 1e-9);
  }
  CHECK(measured_resonant_action(traj.record) == doctest::Approx(resonant_action_estimate(d)).epsilon(0.15));
}

TEST_CASE("rotating frame of an exact subharmonic") {
  const double p0 = 0.8, omega_d = 3.0;
  for (double t : {0.0, 0.37, 5.0, 123.4}) {
    PhaseState s{{std::sqrt(2 * p0) * std::cos(0.5 * omega_d * t)}, {-std::sqrt(2 * p0) * std::sin(0.5 * omega_d * t)}, t};
    const auto f = rotating_frame(s, omega_d);
    REQUIRE(f.angle[0].has_value());
    CHECK(std::abs(*f.angle[0]) < 1e-12);
    CHECK(f.action[0] == doctest::Approx(p0));
  }
  const auto origin = rotating_frame(PhaseState::uniform(2, 0.0, 0.0), 2.0);
  CHECK_FALSE(origin.angle[0].has_value());
  CHECK(origin.action[1] == 0.0);
}

TEST_CASE("dissipative chain locks into period-doubled orbits") {
  const DriveParams d{1.0, 0.5, 2.0, 1.0};
  const ChainParams c{8, -0.1, Boundary::periodic};
  core::RandomSource rng(4);
  const auto traj = integrate_chain_langevin(d, c, {0.1, 0.0}, random_state(8, 21), 3000, rng);
  REQUIRE_FALSE(traj.blew_up);
  const auto& s = traj.record.samples;
  const std::size_t last = s.size() - 1;
  for (int i = 0; i < 8; ++i) {
    CHECK(std::abs(s[last].q[i] - s[last - 2].q[i]) < 1e-8);
    CHECK(s[last].q[i] * s[last - 1].q[i] < 0.0);
    CHECK(std::abs(s[last].q[i]) > 0.1);
  }
}

TEST_CASE("linear instability is flagged as a blow-up") {
  const DriveParams d{1.0, 0.5, 2.0, 0.0};
  const auto traj = integrate_chain_hamiltonian(d, {}, PhaseState::uniform(1, 0.01, 0.0), 5000);
  CHECK(traj.blew_up);
  CHECK(traj.blowup_period > 0);
  CHECK(traj.record.periods() == traj.blowup_period - 1);

  // Explicit bound.
  const auto tight = integrate_chain_hamiltonian(d, {}, PhaseState::uniform(1, 0.01, 0.0), 5000, {.blowup_bound = 1.0});
  CHECK(tight.blew_up);
  CHECK(tight.blowup_period < traj.blowup_period);
}

TEST_CASE("chain preconditions") {
  const DriveParams d{};
  CHECK_THROWS_AS(integrate_chain_hamiltonian(d, {}, PhaseState::uniform(1, 0, 0), 1, {.substeps = 32}), PreconditionError);
  CHECK_THROWS_AS(integrate_chain_hamiltonian(d, {2}, PhaseState::uniform(1, 0, 0), 1), PreconditionError);
  CHECK_THROWS_AS(integrate_chain_hamiltonian({1.0, 0.0, -1.0}, {}, PhaseState::uniform(1, 0, 0), 1), PreconditionError);
  CHECK_THROWS_AS(integrate_chain_hamiltonian({1.0, 0.0, 2.0, -1.0}, {}, PhaseState::uniform(1, 0, 0), 1), PreconditionError);
  core::RandomSource rng(0);
  CHECK_THROWS_AS(integrate_chain_langevin(d, {}, {0.0, 1.0}, PhaseState::uniform(1, 0, 0), 1, rng), PreconditionError);
  PhaseState bad{{NAN}, {0.0}, 0.0};
  CHECK_THROWS_AS(integrate_chain_hamiltonian(d, {}, bad, 1), PreconditionError);
}

TEST_CASE("two-site open chain has one bond") {
  const DriveParams d{};
  const ChainParams open{2, 0.5, Boundary::open}, periodic{2, 0.5, Boundary::periodic};
  PhaseState s{{1.0, 0.0}, {0.0, 0.0}, 0.0};
  // 2 * (1/2) - 0.5 * 1
  CHECK(undriven_energy(d, open, s) == doctest::Approx(0.0));
  CHECK(undriven_energy(d, periodic, s) == undriven_energy(d, open, s));
  ChainParams ring{3, 0.5, Boundary::periodic};
  PhaseState r{{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, 0.0};
  CHECK(undriven_energy(d, ring, r) == doctest::Approx(0.5 - 1.0));
}
