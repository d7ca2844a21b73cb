#include "tcsim/cdw/phase.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "tcsim/core/errors.hpp"

namespace tcsim::cdw {

namespace odeint = boost::numeric::odeint;

namespace {

// Sample grid and averaging window shared by the single and chain integrators.
struct Schedule {
  double dt = 0.0;
  std::size_t samples = 0;  // grid points after t = 0
  std::size_t window_begin = 0, window_end = 0;
};

Schedule make_schedule(const PhaseEomParams& params, const PhaseIntegration& integration) {
  params.validate();
  const double period = params.drive_period();
  require(integration.substeps >= 4, "integrate_phase: substeps must be at least 4");
  require(std::isfinite(integration.t_max) && integration.t_max > 0.0, "integrate_phase: t_max must be positive");
  require(params.e_ac == 0.0 || integration.t_max >= 200.0 * period * (1.0 - 1e-12),
          "integrate_phase: an AC drive needs t_max >= 200 drive periods");
  require(integration.temperature >= 0.0 && std::isfinite(integration.temperature),
          "integrate_phase: temperature must be >= 0");
  Schedule s;
  const auto substeps = static_cast<std::size_t>(integration.substeps);
  s.dt = period / integration.substeps;
  s.samples = static_cast<std::size_t>(std::llround(integration.t_max / s.dt));
  require(s.samples >= 2, "integrate_phase: t_max shorter than two samples");
  const std::size_t periods = s.samples / substeps;
  std::size_t window = periods / 2;
  if (window >= 12) window -= window % 12;
  if (window > 0) {
    s.window_end = periods * substeps;
    s.window_begin = s.window_end - window * substeps;
  } else {
    s.window_end = s.samples;
    s.window_begin = s.samples / 2;
  }
  return s;
}

// Weighted Birkhoff average of samples[begin..end] with a smooth bump weight.
double bump_average(const std::vector<double>& samples, std::size_t begin, std::size_t end) {
  double sum = 0.0, norm = 0.0;
  const double span = static_cast<double>(end - begin);
  for (std::size_t k = begin + 1; k < end; ++k) {
    const double s = static_cast<double>(k - begin) / span;
    const double w = std::exp(-1.0 / (s * (1.0 - s)));
    sum += w * samples[k];
    norm += w;
  }
  return norm > 0.0 ? sum / norm : 0.5 * (samples[begin] + samples[end]);
}

void check_finite(double value, const char* where) {
  if (!std::isfinite(value)) throw NumericalError(std::string(where) + ": non-finite phase");
}

}  // namespace

double PhaseEomParams::drive(double t) const {
  return (e_dc + e_ac * std::cos(omega_d * t)) / e_threshold;
}

double PhaseEomParams::drive_period() const { return 2.0 * std::numbers::pi / omega_d; }

void PhaseEomParams::validate() const {
  require(std::isfinite(omega0_tau) && omega0_tau > 0.0, "PhaseEomParams: omega0_tau must be positive");
  require(std::isfinite(e_threshold) && e_threshold > 0.0, "PhaseEomParams: E_T must be positive");
  require(std::isfinite(omega_d) && omega_d > 0.0, "PhaseEomParams: omega_d must be positive");
  require(std::isfinite(e_dc) && std::isfinite(e_ac), "PhaseEomParams: bias must be finite");
}

PhaseRun integrate_phase(const PhaseEomParams& params, const PhaseIntegration& integration,
                         const PhaseState& initial, core::RandomSource* rng) {
  const Schedule s = make_schedule(params, integration);
  const double gamma = 1.0 / params.omega0_tau;
  const double mobility = params.omega0_tau;

  PhaseRun run;
  run.times.resize(s.samples + 1);
  for (std::size_t k = 0; k <= s.samples; ++k) run.times[k] = static_cast<double>(k) * s.dt;
  run.theta.reserve(s.samples + 1);
  std::vector<double> velocity;
  velocity.reserve(s.samples + 1);

  using State = std::array<double, 2>;
  State x{initial.theta, params.inertial ? initial.velocity : 0.0};
  const auto rate = [&](const State& y, double t) {
    return params.inertial ? y[1] : mobility * (params.drive(t) - std::sin(y[0]));
  };

  if (integration.temperature == 0.0) {
    const auto rhs = [&](const State& y, State& dy, double t) {
      if (params.inertial) {
        dy[0] = y[1];
        dy[1] = params.drive(t) - gamma * y[1] - std::sin(y[0]);
      } else {
        dy[0] = mobility * (params.drive(t) - std::sin(y[0]));
        dy[1] = 0.0;
      }
    };
    auto stepper = odeint::make_dense_output(integration.abs_tolerance, integration.rel_tolerance,
                                             odeint::runge_kutta_dopri5<State>());
    odeint::integrate_times(stepper, rhs, x, run.times.begin(), run.times.end(), s.dt / 4,
                            [&](const State& y, double t) {
                              run.theta.push_back(y[0]);
                              velocity.push_back(rate(y, t));
                            });
  } else {
    require(rng != nullptr, "integrate_phase: T > 0 needs a RandomSource");
    const double dt = s.dt;
    run.theta.push_back(x[0]);
    if (params.inertial) {
      const double kick = std::sqrt(2.0 * gamma * integration.temperature * dt);
      for (std::size_t k = 0; k < s.samples; ++k) {
        const double t = run.times[k];
        x[1] += (params.drive(t) - gamma * x[1] - std::sin(x[0])) * dt + kick * rng->normal();
        x[0] += x[1] * dt;
        run.theta.push_back(x[0]);
      }
    } else {
      const double kick = std::sqrt(2.0 * mobility * integration.temperature * dt);
      for (std::size_t k = 0; k < s.samples; ++k) {
        const double t = run.times[k];
        x[0] += mobility * (params.drive(t) - std::sin(x[0])) * dt + kick * rng->normal();
        run.theta.push_back(x[0]);
      }
    }
  }
  check_finite(x[0], "integrate_phase");
  check_finite(x[1], "integrate_phase");

  const double duration = run.times[s.window_end] - run.times[s.window_begin];
  run.window_start = run.times[s.window_begin];
  run.endpoint_rate = (run.theta[s.window_end] - run.theta[s.window_begin]) / duration;
  run.winding_rate =
      integration.temperature == 0.0 ? bump_average(velocity, s.window_begin, s.window_end) : run.endpoint_rate;
  run.final_state = {x[0], params.inertial ? x[1] : rate(x, run.times.back())};
  return run;
}

namespace {

void check_grid(std::span<const double> grid) {
  require(!grid.empty(), "iv_curve: E_dc grid must be nonempty");
  if (grid.size() < 2) return;
  const bool up = grid[1] > grid[0];
  for (std::size_t i = 1; i < grid.size(); ++i)
    require(up ? grid[i] > grid[i - 1] : grid[i] < grid[i - 1], "iv_curve: E_dc grid must be strictly monotone");
}

void finish_staircase(StaircaseResult& out, const IvOptions& options, double omega_d) {
  const std::size_t n = out.e_dc.size();
  out.differential.assign(n, 0.0);
  if (n >= 2)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i == 0 ? 0 : i - 1, hi = i + 1 == n ? n - 1 : i + 1;
      out.differential[i] = (out.winding_rate[hi] - out.winding_rate[lo]) / (out.e_dc[hi] - out.e_dc[lo]);
    }
  const double tolerance = options.lock_tolerance < 0.0 ? 1e-3 * omega_d : options.lock_tolerance;
  out.plateaus = detect_plateaus(out, options.candidates, omega_d, tolerance);
}

}  // namespace

StaircaseResult iv_curve(const PhaseEomParams& params, std::span<const double> e_dc_grid,
                         const PhaseIntegration& integration, const IvOptions& options, core::RandomSource* rng) {
  check_grid(e_dc_grid);
  StaircaseResult out;
  PhaseState state;
  PhaseEomParams point = params;
  for (double e : e_dc_grid) {
    point.e_dc = e;
    const auto run = integrate_phase(point, integration, options.warm_start ? state : PhaseState{}, rng);
    state = run.final_state;
    out.e_dc.push_back(e);
    out.winding_rate.push_back(run.winding_rate);
  }
  finish_staircase(out, options, params.omega_d);
  return out;
}

std::vector<Plateau> detect_plateaus(const StaircaseResult& staircase,
                                     std::span<const std::pair<int, int>> candidates, double omega_d,
                                     double lock_tolerance) {
  require(staircase.e_dc.size() == staircase.winding_rate.size(), "detect_plateaus: staircase columns differ");
  require(lock_tolerance > 0.0, "detect_plateaus: lock tolerance must be positive");
  std::vector<Plateau> found;
  const std::size_t n = staircase.e_dc.size();
  for (auto [p, q] : candidates) {
    require(q > 0, "detect_plateaus: q must be positive");
    const double target = static_cast<double>(p) / q * omega_d;
    Plateau best{p, q, 0.0, 0.0};
    std::size_t i = 0;
    while (i < n) {
      if (std::abs(staircase.winding_rate[i] - target) >= lock_tolerance) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 < n && std::abs(staircase.winding_rate[j + 1] - target) < lock_tolerance) ++j;
      const double width = std::abs(staircase.e_dc[j] - staircase.e_dc[i]);
      if (width > best.width) {
        best.width = width;
        best.center = 0.5 * (staircase.e_dc[i] + staircase.e_dc[j]);
      }
      i = j + 1;
    }
    if (best.width > 0.0) found.push_back(best);
  }
  return found;
}

std::optional<Plateau> find_plateau(const std::vector<Plateau>& plateaus, int p, int q) {
  for (const auto& plateau : plateaus)
    if (plateau.p == p && plateau.q == q) return plateau;
  return std::nullopt;
}

ChainCdwParams ChainCdwParams::random(int n, double stiffness, core::RandomSource& rng) {
  require(n >= 1, "ChainCdwParams: n must be at least 1");
  ChainCdwParams chain{n, stiffness, std::vector<double>(static_cast<std::size_t>(n))};
  for (auto& b : chain.beta) b = rng.uniform(0.0, 2.0 * std::numbers::pi);
  chain.validate();
  return chain;
}

void ChainCdwParams::validate() const {
  require(n >= 1, "ChainCdwParams: n must be at least 1");
  require(std::isfinite(stiffness) && stiffness >= 0.0, "ChainCdwParams: stiffness must be >= 0");
  require(beta.size() == static_cast<std::size_t>(n), "ChainCdwParams: need one pinning phase per site");
}

ChainRun integrate_chain(const ChainCdwParams& chain, const PhaseEomParams& drive,
                         const PhaseIntegration& integration, std::span<const double> initial,
                         core::RandomSource* rng) {
  chain.validate();
  require(!drive.inertial, "integrate_chain: the chain model is overdamped");
  require(initial.empty() || initial.size() == static_cast<std::size_t>(chain.n),
          "integrate_chain: initial phases must match the chain size");
  const Schedule s = make_schedule(drive, integration);
  const std::size_t n = static_cast<std::size_t>(chain.n);
  const double mobility = drive.omega0_tau;
  const double k = chain.stiffness;

  using State = std::vector<double>;
  State x = initial.empty() ? State(n, 0.0) : State(initial.begin(), initial.end());
  const auto force = [&](const State& y, State& dy, double t) {
    const double e = drive.drive(t);
    for (std::size_t i = 0; i < n; ++i) {
      const double left = y[(i + n - 1) % n], right = y[(i + 1) % n];
      dy[i] = mobility * (e - std::sin(y[i] + chain.beta[i]) + k * (left + right - 2.0 * y[i]));
    }
  };

  State at_begin, dx(n);
  double rate = 0.0;
  if (integration.temperature == 0.0) {
    std::vector<double> times{0.0};
    for (std::size_t k = s.window_begin; k <= s.window_end; ++k) times.push_back(static_cast<double>(k) * s.dt);
    std::vector<double> mean_velocity;
    mean_velocity.reserve(times.size());
    auto stepper = odeint::make_dense_output(integration.abs_tolerance, integration.rel_tolerance,
                                             odeint::runge_kutta_dopri5<State>());
    bool first = true;
    State last;
    odeint::integrate_times(stepper, force, x, times.begin(), times.end(), s.dt / 4,
                            [&](const State& y, double t) {
                              if (first) {
                                first = false;
                                return;
                              }
                              if (at_begin.empty()) at_begin = y;
                              force(y, dx, t);
                              double v = 0.0;
                              for (double d : dx) v += d;
                              mean_velocity.push_back(v / static_cast<double>(n));
                              last = y;
                            });
    x = last;
    rate = bump_average(mean_velocity, 0, mean_velocity.size() - 1);
  } else {
    require(rng != nullptr, "integrate_chain: T > 0 needs a RandomSource");
    const double kick = std::sqrt(2.0 * mobility * integration.temperature * s.dt);
    for (std::size_t step = 0; step < s.window_end; ++step) {
      if (step == s.window_begin) at_begin = x;
      force(x, dx, static_cast<double>(step) * s.dt);
      for (std::size_t i = 0; i < n; ++i) x[i] += dx[i] * s.dt + kick * rng->normal();
    }
  }
  for (double v : x) check_finite(v, "integrate_chain");
  const double duration = static_cast<double>(s.window_end - s.window_begin) * s.dt;
  double winding = 0.0;
  for (std::size_t i = 0; i < n; ++i) winding += x[i] - at_begin[i];
  ChainRun out{std::move(x), 0.0, winding / (static_cast<double>(n) * duration)};
  out.winding_rate = integration.temperature == 0.0 ? rate : out.endpoint_rate;
  return out;
}

StaircaseResult chain_iv(const ChainCdwParams& chain, const PhaseEomParams& drive,
                         std::span<const double> e_dc_grid, const PhaseIntegration& integration,
                         const IvOptions& options, core::RandomSource* rng) {
  check_grid(e_dc_grid);
  StaircaseResult out;
  std::vector<double> state;
  PhaseEomParams point = drive;
  for (double e : e_dc_grid) {
    point.e_dc = e;
    auto run = integrate_chain(chain, point, integration,
                               options.warm_start ? std::span<const double>(state) : std::span<const double>(), rng);
    state = std::move(run.theta);
    out.e_dc.push_back(e);
    out.winding_rate.push_back(run.winding_rate);
  }
  finish_staircase(out, options, drive.omega_d);
  return out;
}

PhaseEomParams rcsj_map(const JunctionParams& j) {
  require(std::isfinite(j.critical_current) && j.critical_current > 0.0, "rcsj_map: I_c must be positive");
  require(std::isfinite(j.normal_resistance) && j.normal_resistance > 0.0, "rcsj_map: R_N must be positive");
  require(std::isfinite(j.capacitance) && j.capacitance >= 0.0, "rcsj_map: C must be >= 0");
  require(std::isfinite(j.omega_d) && j.omega_d > 0.0, "rcsj_map: omega_d must be positive");
  require(std::isfinite(j.i_dc) && std::isfinite(j.i_ac), "rcsj_map: currents must be finite");
  const double omega_c = 2.0 * j.critical_current * j.normal_resistance;
  PhaseEomParams p;
  p.e_threshold = 1.0;
  p.e_dc = j.i_dc / j.critical_current;
  p.e_ac = j.i_ac / j.critical_current;
  if (j.capacitance == 0.0) {
    p.inertial = false;
    p.omega0_tau = 1.0;
  } else {
    p.inertial = true;
    p.omega0_tau = omega_c / std::sqrt(2.0 * j.critical_current / j.capacitance);
  }
  p.omega_d = j.omega_d / rcsj_frequency_scale(j);
  return p;
}

double rcsj_frequency_scale(const JunctionParams& j) {
  require(j.critical_current > 0.0 && j.normal_resistance > 0.0 && j.capacitance >= 0.0,
          "rcsj_frequency_scale: invalid junction");
  return j.capacitance == 0.0 ? 2.0 * j.critical_current * j.normal_resistance
                              : std::sqrt(2.0 * j.critical_current / j.capacitance);
}

}  // namespace tcsim::cdw
