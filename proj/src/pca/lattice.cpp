#include "tcsim/pca/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "tcsim/core/errors.hpp"

namespace tcsim::pca {

namespace {

void check_dims(int lx, int ly) {
  require(lx >= 1 && ly >= 1, "lattice: dimensions must be positive");
}

}  // namespace

SpinLattice2D SpinLattice2D::uniform(int lx, int ly, int spin) {
  check_dims(lx, ly);
  require(spin == 1 || spin == -1, "SpinLattice2D: spin must be +1 or -1");
  return {lx, ly, std::vector<std::int8_t>(static_cast<std::size_t>(lx) * ly, static_cast<std::int8_t>(spin))};
}

SpinLattice2D SpinLattice2D::random(int lx, int ly, core::RandomSource& rng) {
  auto out = uniform(lx, ly, 1);
  for (auto& s : out.spins) s = rng.bernoulli(0.5) ? 1 : -1;
  return out;
}

double SpinLattice2D::magnetization() const {
  long long sum = 0;
  for (auto s : spins) sum += s;
  return static_cast<double>(sum) / static_cast<double>(spins.size());
}

void SpinLattice2D::validate() const {
  check_dims(lx, ly);
  require(spins.size() == static_cast<std::size_t>(lx) * ly, "SpinLattice2D: size does not match dimensions");
  require(std::all_of(spins.begin(), spins.end(), [](std::int8_t s) { return s == 1 || s == -1; }),
          "SpinLattice2D: cells must be +1 or -1");
}

ClockLattice2D ClockLattice2D::uniform(int lx, int ly, int m, int state) {
  check_dims(lx, ly);
  require(m >= 2 && m <= 255, "ClockLattice2D: m must lie in [2, 255]");
  require(state >= 0 && state < m, "ClockLattice2D: state out of range");
  return {lx, ly, m, std::vector<std::uint8_t>(static_cast<std::size_t>(lx) * ly, static_cast<std::uint8_t>(state))};
}

ClockLattice2D ClockLattice2D::random(int lx, int ly, int m, core::RandomSource& rng) {
  auto out = uniform(lx, ly, m, 0);
  for (auto& s : out.states) s = static_cast<std::uint8_t>(rng.uniform_index(static_cast<std::uint64_t>(m)));
  return out;
}

double ClockLattice2D::order_parameter() const {
  std::vector<long long> counts(static_cast<std::size_t>(m), 0);
  for (auto s : states) ++counts[s];
  double re = 0.0;
  for (int k = 0; k < m; ++k) re += counts[k] * std::cos(2.0 * std::numbers::pi * k / m);
  return re / static_cast<double>(states.size());
}

void ClockLattice2D::validate() const {
  check_dims(lx, ly);
  require(m >= 2 && m <= 255, "ClockLattice2D: m must lie in [2, 255]");
  require(states.size() == static_cast<std::size_t>(lx) * ly, "ClockLattice2D: size does not match dimensions");
  require(std::all_of(states.begin(), states.end(), [&](std::uint8_t s) { return s < m; }),
          "ClockLattice2D: state out of range");
}

NoiseParams NoiseParams::from_bias(double bias, double amplitude) {
  NoiseParams n{0.5 * amplitude * (1.0 + bias), 0.5 * amplitude * (1.0 - bias)};
  require(bias >= -1.0 && bias <= 1.0, "NoiseParams: bias must lie in [-1, 1]");
  n.validate();
  return n;
}

double NoiseParams::bias() const {
  const double a = amplitude();
  return a > 0.0 ? (up - down) / a : 0.0;
}

void NoiseParams::validate() const {
  require(up >= 0.0 && down >= 0.0, "NoiseParams: rates must be non-negative");
  require(up + down <= 1.0, "NoiseParams: up + down must not exceed 1");
}

void write_pbm(std::ostream& out, const SpinLattice2D& lattice) {
  out << "P1 " << lattice.lx << ' ' << lattice.ly << '\n';
  for (int y = 0; y < lattice.ly; ++y) {
    std::string row(static_cast<std::size_t>(lattice.lx), '0');
    for (int x = 0; x < lattice.lx; ++x)
      if (lattice.at(x, y) > 0) row[x] = '1';
    out << row << '\n';
  }
}

SpinLattice2D read_pbm(std::istream& in) {
  std::string magic;
  int lx = 0, ly = 0;
  in >> magic >> lx >> ly;
  require(in && magic == "P1", "read_pbm: expected a 'P1 <Lx> <Ly>' header");
  auto out = SpinLattice2D::uniform(lx, ly, -1);
  for (int y = 0; y < ly; ++y) {
    std::string row;
    in >> row;
    require(in && row.size() == static_cast<std::size_t>(lx), "read_pbm: row " + std::to_string(y) + " is malformed");
    for (int x = 0; x < lx; ++x) {
      require(row[x] == '0' || row[x] == '1', "read_pbm: cells must be 0 or 1");
      if (row[x] == '1') out.set(x, y, 1);
    }
  }
  return out;
}

}  // namespace tcsim::pca
