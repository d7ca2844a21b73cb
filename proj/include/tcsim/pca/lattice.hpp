#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tcsim/core/random.hpp"

namespace tcsim::pca {

/// Periodic Lx x Ly lattice of +-1 spins, row-major: cell (x, y) at y * Lx + x.
/// East is x + 1, north is y + 1.
struct SpinLattice2D {
  int lx = 0, ly = 0;
  std::vector<std::int8_t> spins;

  static SpinLattice2D uniform(int lx, int ly, int spin);
  static SpinLattice2D random(int lx, int ly, core::RandomSource& rng);

  std::size_t cells() const { return spins.size(); }
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * lx + x; }
  int at(int x, int y) const { return spins[index(x, y)]; }
  void set(int x, int y, int spin) { spins[index(x, y)] = static_cast<std::int8_t>(spin); }
  double magnetization() const;
  void validate() const;

  bool operator==(const SpinLattice2D&) const = default;
};

/// Lattice over Z_m: every cell in 0..m-1.
struct ClockLattice2D {
  int lx = 0, ly = 0, m = 2;
  std::vector<std::uint8_t> states;

  static ClockLattice2D uniform(int lx, int ly, int m, int state);
  static ClockLattice2D random(int lx, int ly, int m, core::RandomSource& rng);

  std::size_t cells() const { return states.size(); }
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * lx + x; }
  /// Re of the mean of exp(2 pi i s / m).
  double order_parameter() const;
  void validate() const;

  bool operator==(const ClockLattice2D&) const = default;
};

/// Per cell and step: set to +1 with probability `up`, to -1 with probability
/// `down`, otherwise unchanged.
struct NoiseParams {
  double up = 0.0;    // epsilon_p
  double down = 0.0;  // epsilon_q

  static NoiseParams from_bias(double bias, double amplitude);
  double amplitude() const { return up + down; }
  double bias() const;  // (up - down) / (up + down); 0 when both vanish
  void validate() const;
};

/// "P1 <Lx> <Ly>" then Ly rows of Lx characters, '1' for +1 and '0' for -1,
/// row y = 0 first.
void write_pbm(std::ostream& out, const SpinLattice2D& lattice);
SpinLattice2D read_pbm(std::istream& in);

}  // namespace tcsim::pca
