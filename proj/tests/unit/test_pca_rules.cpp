#include "doctest.h"

#include <cmath>
#include <sstream>

#include "tcsim/core/errors.hpp"
#include "tcsim/pca/automaton.hpp"

using namespace tcsim;
using namespace tcsim::pca;

namespace {

// Reference NEC majority: reads only `in`, writes a separate result.
SpinLattice2D reference_toom(const SpinLattice2D& in) {
  SpinLattice2D out = SpinLattice2D::uniform(in.lx, in.ly, 1);
  for (int y = 0; y < in.ly; ++y)
    for (int x = 0; x < in.lx; ++x) {
      const int sum = in.at(x, y) + in.at((x + 1) % in.lx, y) + in.at(x, (y + 1) % in.ly);
      out.set(x, y, sum > 0 ? 1 : -1);
    }
  return out;
}

SpinLattice2D negated(SpinLattice2D lattice) {
  for (auto& s : lattice.spins) s = static_cast<std::int8_t>(-s);
  return lattice;
}

}  // namespace

TEST_CASE("uniform states under Toom and pi-Toom") {
  const auto up = SpinLattice2D::uniform(16, 12, 1);
  CHECK(step_rule(up, ToomNEC{}) == up);
  const auto once = step_rule(up, PiToom{});
  CHECK(once == SpinLattice2D::uniform(16, 12, -1));
  CHECK(step_rule(once, PiToom{}) == up);
}

TEST_CASE("Toom matches a two-pass reference on odd shapes") {
  core::RandomSource rng(3);
  for (auto [lx, ly] : {std::pair{1, 1}, {7, 5}, {2, 9}, {33, 17}}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto lattice = SpinLattice2D::random(lx, ly, rng);
      CHECK(step_rule(lattice, ToomNEC{}) == reference_toom(lattice));
    }
  }
}

TEST_CASE("pi-Toom, rotated Toom and flip covariance") {
  core::RandomSource rng(11);
  const auto rotated = make_rotated_rule(ToomNEC{}, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto lattice = SpinLattice2D::random(24, 20, rng);
    const auto toom = step_rule(lattice, ToomNEC{});
    const auto pi = step_rule(lattice, PiToom{});
    CHECK(pi == negated(toom));
    CHECK(step_rule(lattice, rotated) == pi);
    CHECK(step_rule(negated(lattice), ToomNEC{}) == negated(toom));
  }
}

TEST_CASE("Toom is monotone") {
  core::RandomSource rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto low = SpinLattice2D::random(20, 20, rng);
    auto high = low;
    for (auto& s : high.spins)
      if (rng.bernoulli(0.3)) s = 1;
    const auto a = step_rule(low, ToomNEC{});
    const auto b = step_rule(high, ToomNEC{});
    bool ordered = true;
    for (std::size_t i = 0; i < a.cells(); ++i) ordered = ordered && a.spins[i] <= b.spins[i];
    CHECK(ordered);
  }
}

TEST_CASE("an 8x8 island is erased within 16 steps") {
  auto lattice = SpinLattice2D::uniform(64, 64, 1);
  for (int y = 20; y < 28; ++y)
    for (int x = 30; x < 38; ++x) lattice.set(x, y, -1);
  const auto sea = SpinLattice2D::uniform(64, 64, 1);
  int erased_at = -1;
  for (int t = 1; t <= 16 && erased_at < 0; ++t) {
    lattice = step_rule(lattice, ToomNEC{});
    if (lattice == sea) erased_at = t;
  }
  CHECK(erased_at > 0);
  CHECK(erased_at <= 16);
}

TEST_CASE("deterministic step rejects stochastic rules") {
  const auto lattice = SpinLattice2D::uniform(4, 4, 1);
  CHECK_THROWS_AS(step_rule(lattice, GlauberIsing{}), PreconditionError);
  CHECK_THROWS_AS(make_rotated_rule(ToomNEC{}, 1), PreconditionError);
  CHECK_THROWS_AS(make_rotated_rule(PiToom{}, 2), PreconditionError);
  core::RandomSource rng(1);
  CHECK_THROWS_AS(step_rule(SpinLattice2D::uniform(5, 4, 1), GlauberIsing{}, rng), PreconditionError);
  auto bad = lattice;
  bad.spins[3] = 0;
  CHECK_THROWS_AS(step_rule(bad, ToomNEC{}), PreconditionError);
}

TEST_CASE("noise limits and binomial frequency") {
  core::RandomSource rng(17);
  const auto start = SpinLattice2D::random(40, 30, rng);
  CHECK(apply_noise(start, {0.0, 0.0}, rng) == start);
  CHECK(apply_noise(start, {1.0, 0.0}, rng) == SpinLattice2D::uniform(40, 30, 1));
  CHECK(apply_noise(start, {0.0, 1.0}, rng) == SpinLattice2D::uniform(40, 30, -1));
  CHECK_THROWS_AS(apply_noise(start, {0.6, 0.5}, rng), PreconditionError);
  CHECK_THROWS_AS(apply_noise(start, {-0.1, 0.5}, rng), PreconditionError);

  // From all-down, only up-sets change a cell; from all-up, only down-sets.
  const int n = 1000 * 1000;
  const double p = 0.1, sigma = std::sqrt(n * p * (1 - p));
  const auto down = apply_noise(SpinLattice2D::uniform(1000, 1000, -1), {0.1, 0.1}, rng);
  const auto up = apply_noise(SpinLattice2D::uniform(1000, 1000, 1), {0.1, 0.1}, rng);
  const double raised = (down.magnetization() + 1.0) / 2.0 * n;
  const double lowered = (1.0 - up.magnetization()) / 2.0 * n;
  CHECK(std::abs(raised - n * p) < 3 * sigma);
  CHECK(std::abs(lowered - n * p) < 3 * sigma);
}

TEST_CASE("pi-Toom alternates exactly without noise") {
  core::RandomSource rng(2);
  const auto run = run_pca(SpinLattice2D::uniform(32, 32, 1), PiToom{}, {}, 64, rng);
  const auto m = run.magnetization.values();
  for (std::size_t t = 0; t < m.size(); ++t) CHECK(m[t] == (t % 2 ? -1.0 : 1.0));
  REQUIRE(run.demodulated.has_value());
  for (double v : run.demodulated->values()) CHECK(v == 1.0);
  REQUIRE(run.spectrum.has_value());
  CHECK(run.spectrum->subharmonic_amplitude() == doctest::Approx(1.0).epsilon(1e-12));

  const auto plain = run_pca(SpinLattice2D::uniform(8, 8, 1), ToomNEC{}, {}, 4, rng);
  CHECK_FALSE(plain.demodulated.has_value());
  CHECK_THROWS_AS(run_pca(SpinLattice2D::uniform(8, 8, 1), ToomNEC{}, {}, 0, rng), PreconditionError);
}

TEST_CASE("noiseless Toom reaches consensus from most random starts") {
  int consensus = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    core::RandomSource rng(seed);
    const auto run = run_pca(SpinLattice2D::random(32, 32, rng), ToomNEC{}, {}, 2000, rng);
    const auto m = run.magnetization.values();
    if (std::abs(m.back()) == 1.0) ++consensus;
    // The rest settle into patterns of constant magnetization.
    CHECK(m[m.size() - 500] == m.back());
  }
  CHECK(consensus >= 20);
}

TEST_CASE("Z_3 rotated Toom") {
  const auto rule = make_rotated_rule(ToomNEC{}, 3);
  auto lattice = ClockLattice2D::uniform(12, 12, 3, 0);
  const auto start = lattice;
  lattice = step_rule(lattice, rule);
  CHECK_FALSE(lattice == start);
  lattice = step_rule(lattice, rule);
  CHECK_FALSE(lattice == start);
  lattice = step_rule(lattice, rule);
  CHECK(lattice == start);

  core::RandomSource rng(9);
  const auto clean = run_clock(start, rule, 0.0, 299, rng);
  CHECK(clean.spectrum.subharmonic_amplitude() == doctest::Approx(0.5).epsilon(1e-3));
  const auto noisy = run_clock(ClockLattice2D::uniform(64, 64, 3, 0), rule, 0.02, 1000, rng);
  CHECK(noisy.spectrum.peak_at(1.0 / 3.0) > 0.4);
  CHECK(noisy.spectrum.peak_at(0.25) < 0.05);

  // Plurality with self winning ties.
  auto tie = ClockLattice2D::uniform(3, 3, 3, 0);
  tie.states[tie.index(1, 0)] = 1;
  tie.states[tie.index(0, 1)] = 2;
  CHECK(step_rule(tie, ToomNEC{}).states[0] == 0);
  CHECK_THROWS_AS(step_rule(tie, make_rotated_rule(ToomNEC{}, 4)), PreconditionError);
  CHECK_THROWS_AS(step_rule(tie, PiToom{}), PreconditionError);
}

TEST_CASE("clock noise never keeps the old state") {
  core::RandomSource rng(4);
  const auto start = ClockLattice2D::uniform(50, 50, 4, 2);
  const auto noisy = apply_clock_noise(start, 1.0, rng);
  std::array<int, 4> counts{};
  for (auto s : noisy.states) ++counts[s];
  CHECK(counts[2] == 0);
  for (int k : {0, 1, 3}) CHECK(std::abs(counts[k] - 2500.0 / 3.0) < 3 * std::sqrt(2500.0 * 2 / 9));
}

TEST_CASE("PBM round trip") {
  core::RandomSource rng(8);
  const auto lattice = SpinLattice2D::random(13, 7, rng);
  std::stringstream buffer;
  write_pbm(buffer, lattice);
  CHECK(buffer.str().rfind("P1 13 7\n", 0) == 0);
  CHECK(read_pbm(buffer) == lattice);

  std::stringstream bad("P1 3 2\n101\n1x1\n");
  CHECK_THROWS_AS(read_pbm(bad), PreconditionError);
  std::stringstream short_rows("P1 3 2\n101\n");
  CHECK_THROWS_AS(read_pbm(short_rows), PreconditionError);
}
