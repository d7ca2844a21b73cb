#pragma once

#include <array>
#include <complex>
#include <vector>

namespace tcsim::oscillator {

/// Damped Mathieu equation x'' = -[omega0^2 + delta' cos(omega_d t)] x - c x'
/// in chart units omega_d = 2 (period pi), so a = (2 omega0)^2 / omega_d^2 =
/// omega0^2 and delta' = delta * omega0^2.
struct Monodromy {
  std::array<double, 4> matrix{};  // row-major 2x2
  std::array<std::complex<double>, 2> multipliers;
  double max_magnitude = 0.0;
  double determinant = 0.0;
  bool stable = true;  // max |multiplier| <= 1 + 1e-9
};

inline constexpr int kDefaultMathieuSubsteps = 2048;

Monodromy mathieu_monodromy(double a, double delta, double damping,
                            int substeps = kDefaultMathieuSubsteps);

/// Smallest delta in (0, delta_max] at which the point (a, delta) is unstable,
/// located by bisection to relative tolerance `tolerance`. Returns delta_max
/// when the whole segment is stable.
double critical_delta(double a, double damping, double delta_max, double tolerance = 1e-6,
                      int substeps = kDefaultMathieuSubsteps);

struct ChartGrid {
  double a_min = 0.0, a_max = 5.0;
  int a_points = 64;
  double delta_min = 0.0, delta_max = 1.0;
  int delta_points = 64;
};

struct StabilityChart {
  std::vector<double> a, delta;
  /// Row-major, one row per delta value.
  std::vector<double> max_multiplier;
  std::vector<bool> stable;
  std::vector<bool> boundary;  // stability differs from a 4-neighbor

  std::size_t index(std::size_t i_delta, std::size_t i_a) const { return i_delta * a.size() + i_a; }
  bool stable_at(std::size_t i_delta, std::size_t i_a) const { return stable[index(i_delta, i_a)]; }
};

StabilityChart tongue_boundary_scan(const ChartGrid& grid, double damping,
                                    int substeps = kDefaultMathieuSubsteps);

}  // namespace tcsim::oscillator
