#include "tcsim/oscillator/mathieu.hpp"

#include <cmath>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "tcsim/core/errors.hpp"

namespace tcsim::oscillator {

namespace {

constexpr double kOmegaD = 2.0;
constexpr double kStableSlack = 1e-9;
constexpr int kCoarseSteps = 64;

// Two fundamental solutions side by side: (x1, v1, x2, v2).
using Pair = std::array<double, 4>;

}  // namespace

Monodromy mathieu_monodromy(double a, double delta, double damping, int substeps) {
  require(substeps >= 512, "mathieu_monodromy: need at least 512 substeps per period");
  require(std::isfinite(a) && std::isfinite(delta) && std::isfinite(damping),
          "mathieu_monodromy: parameters must be finite");
  const double period = 2.0 * std::numbers::pi / kOmegaD;
  const double dprime = delta * a;
  const auto rhs = [&](const Pair& s, Pair& ds, double t) {
    const double k = a + dprime * std::cos(kOmegaD * t);
    ds[0] = s[1];
    ds[1] = -k * s[0] - damping * s[1];
    ds[2] = s[3];
    ds[3] = -k * s[2] - damping * s[3];
  };
  Pair state{1.0, 0.0, 0.0, 1.0};
  boost::numeric::odeint::runge_kutta4<Pair> stepper;
  boost::numeric::odeint::integrate_n_steps(stepper, rhs, state, 0.0, period / substeps, substeps);
  for (double v : state)
    if (!std::isfinite(v)) throw NumericalError("mathieu_monodromy: non-finite trajectory");

  Monodromy m;
  // Columns are the images of (1, 0) and (0, 1).
  m.matrix = {state[0], state[2], state[1], state[3]};
  const double trace = state[0] + state[3];
  m.determinant = state[0] * state[3] - state[2] * state[1];
  const std::complex<double> root = std::sqrt(std::complex<double>(0.25 * trace * trace - m.determinant));
  m.multipliers = {0.5 * trace + root, 0.5 * trace - root};
  m.max_magnitude = std::max(std::abs(m.multipliers[0]), std::abs(m.multipliers[1]));
  m.stable = m.max_magnitude <= 1.0 + kStableSlack;
  return m;
}

double critical_delta(double a, double damping, double delta_max, double tolerance, int substeps) {
  require(delta_max > 0.0, "critical_delta: delta_max must be positive");
  const auto unstable = [&](double d) { return !mathieu_monodromy(a, d, damping, substeps).stable; };
  double lo = 0.0, hi = -1.0;
  for (int k = 1; k <= kCoarseSteps; ++k) {
    const double d = delta_max * k / kCoarseSteps;
    if (unstable(d)) {
      hi = d;
      break;
    }
    lo = d;
  }
  if (hi < 0.0) return delta_max;
  while (hi - lo > tolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    (unstable(mid) ? hi : lo) = mid;
  }
  return hi;
}

StabilityChart tongue_boundary_scan(const ChartGrid& grid, double damping, int substeps) {
  require(grid.a_points >= 32 && grid.delta_points >= 32, "tongue_boundary_scan: grid must be at least 32x32");
  require(grid.a_max > grid.a_min && grid.delta_max > grid.delta_min,
          "tongue_boundary_scan: grid ranges must be increasing");
  StabilityChart chart;
  for (int i = 0; i < grid.a_points; ++i)
    chart.a.push_back(grid.a_min + (grid.a_max - grid.a_min) * i / (grid.a_points - 1));
  for (int j = 0; j < grid.delta_points; ++j)
    chart.delta.push_back(grid.delta_min + (grid.delta_max - grid.delta_min) * j / (grid.delta_points - 1));

  const std::size_t na = chart.a.size(), nd = chart.delta.size();
  chart.max_multiplier.resize(na * nd);
  chart.stable.resize(na * nd);
  chart.boundary.assign(na * nd, false);
  for (std::size_t j = 0; j < nd; ++j)
    for (std::size_t i = 0; i < na; ++i) {
      const auto m = mathieu_monodromy(chart.a[i], chart.delta[j], damping, substeps);
      chart.max_multiplier[chart.index(j, i)] = m.max_magnitude;
      chart.stable[chart.index(j, i)] = m.stable;
    }
  for (std::size_t j = 0; j < nd; ++j)
    for (std::size_t i = 0; i < na; ++i) {
      const bool s = chart.stable_at(j, i);
      const bool edge = (i > 0 && chart.stable_at(j, i - 1) != s) || (i + 1 < na && chart.stable_at(j, i + 1) != s) ||
                        (j > 0 && chart.stable_at(j - 1, i) != s) || (j + 1 < nd && chart.stable_at(j + 1, i) != s);
      chart.boundary[chart.index(j, i)] = edge;
    }
  return chart;
}

}  // namespace tcsim::oscillator
