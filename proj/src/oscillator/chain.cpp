#include "tcsim/oscillator/chain.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "tcsim/core/errors.hpp"

namespace tcsim::oscillator {

namespace {

std::vector<std::pair<int, int>> bonds(const ChainParams& chain) {
  std::vector<std::pair<int, int>> out;
  const int n = chain.sites;
  for (int i = 0; i + 1 < n; ++i) out.emplace_back(i, i + 1);
  if (chain.boundary == Boundary::periodic && n >= 3) out.emplace_back(n - 1, 0);
  return out;
}

double automatic_bound(const DriveParams& drive, const PhaseState& initial) {
  double scale = std::sqrt(2.0 * resonant_action_estimate(drive));
  for (int i = 0; i < initial.sites(); ++i)
    scale = std::max({scale, std::abs(initial.q[i]), std::abs(initial.p[i])});
  return 1e3 * std::max(scale, 1.0);
}

}  // namespace

ChainIntegrator::ChainIntegrator(const DriveParams& drive, const ChainParams& chain,
                                 const PhaseState& initial, IntegrationOptions options,
                                 const BathParams& bath, core::RandomSource* rng)
    : drive_(drive), bonds_(bonds(chain)), spring_(2.0 * chain.coupling), state_(initial),
      f_(initial.q.size()), substeps_(options.substeps), rng_(rng) {
  drive.validate();
  chain.validate();
  bath.validate();
  initial.validate();
  require(initial.sites() == chain.sites, "ChainIntegrator: state size differs from chain size");
  require(options.substeps >= 64, "ChainIntegrator: need at least 64 substeps per period");
  t0_ = initial.t;
  period_ = drive.period();
  h_ = period_ / substeps_;
  bound_ = options.blowup_bound > 0.0 ? options.blowup_bound : automatic_bound(drive, initial);
  stochastic_ = bath.friction > 0.0 || bath.temperature > 0.0;
  if (stochastic_) {
    decay_ = std::exp(-bath.friction * h_);
    kick_ = std::sqrt(bath.temperature * (1.0 - decay_ * decay_));
    require(kick_ == 0.0 || rng_ != nullptr, "ChainIntegrator: a finite temperature needs a RandomSource");
  }
  force(t0_);
}

void ChainIntegrator::force(double t) {
  const auto& q = state_.q;
  const double k = drive_.stiffness(t);
  for (std::size_t i = 0; i < q.size(); ++i) f_[i] = -k * q[i] - drive_.kappa * q[i] * q[i] * q[i];
  if (spring_ != 0.0)
    for (const auto& [i, j] : bonds_) {
      const double d = spring_ * (q[i] - q[j]);
      f_[i] += d;
      f_[j] -= d;
    }
}

void ChainIntegrator::verlet_step(double t_next) {
  auto& q = state_.q;
  auto& p = state_.p;
  for (std::size_t i = 0; i < q.size(); ++i) {
    p[i] += 0.5 * h_ * f_[i];
    q[i] += h_ * p[i];
  }
  force(t_next);
  for (std::size_t i = 0; i < q.size(); ++i) p[i] += 0.5 * h_ * f_[i];
}

void ChainIntegrator::baoab_step(double t_next) {
  auto& q = state_.q;
  auto& p = state_.p;
  for (std::size_t i = 0; i < q.size(); ++i) {
    p[i] += 0.5 * h_ * f_[i];
    q[i] += 0.5 * h_ * p[i];
    p[i] = decay_ * p[i] + (kick_ > 0.0 ? kick_ * rng_->normal() : 0.0);
    q[i] += 0.5 * h_ * p[i];
  }
  force(t_next);
  for (std::size_t i = 0; i < q.size(); ++i) p[i] += 0.5 * h_ * f_[i];
}

bool ChainIntegrator::advance_period() {
  if (blown_up_) return false;
  const double start = t0_ + static_cast<double>(periods_) * period_;
  for (int k = 1; k <= substeps_; ++k) {
    const double t_next = start + k * h_;
    stochastic_ ? baoab_step(t_next) : verlet_step(t_next);
  }
  ++periods_;
  state_.t = t0_ + static_cast<double>(periods_) * period_;
  for (std::size_t i = 0; i < state_.q.size(); ++i)
    if (!std::isfinite(state_.q[i]) || !std::isfinite(state_.p[i]) || std::abs(state_.q[i]) > bound_)
      blown_up_ = true;
  return !blown_up_;
}

namespace {

ChainTrajectory run(ChainIntegrator& integrator, int n_periods, double period) {
  require(n_periods >= 0, "integrate_chain: n_periods must be non-negative");
  ChainTrajectory out;
  out.record.period = period;
  out.record.samples.reserve(static_cast<std::size_t>(n_periods) + 1);
  out.record.samples.push_back(integrator.state());
  for (int n = 1; n <= n_periods; ++n) {
    if (!integrator.advance_period()) {
      out.blew_up = true;
      out.blowup_period = n;
      break;
    }
    out.record.samples.push_back(integrator.state());
  }
  out.final_state = integrator.state();
  return out;
}

}  // namespace

void DriveParams::validate() const {
  require(omega0 > 0.0 && std::isfinite(omega0), "DriveParams: omega0 must be positive");
  require(omega_d > 0.0 && std::isfinite(omega_d), "DriveParams: omega_d must be positive");
  require(kappa >= 0.0 && std::isfinite(kappa), "DriveParams: kappa must be non-negative");
  require(std::isfinite(delta), "DriveParams: delta must be finite");
}

double DriveParams::period() const { return 2.0 * std::numbers::pi / omega_d; }

double DriveParams::stiffness(double t) const {
  return omega0 * omega0 * (1.0 + delta * std::cos(omega_d * t));
}

void ChainParams::validate() const {
  require(sites >= 1, "ChainParams: need at least one site");
  require(std::isfinite(coupling), "ChainParams: coupling must be finite");
}

void BathParams::validate() const {
  require(friction >= 0.0 && std::isfinite(friction), "BathParams: friction must be non-negative");
  require(temperature >= 0.0 && std::isfinite(temperature), "BathParams: temperature must be non-negative");
  require(temperature == 0.0 || friction > 0.0, "BathParams: a finite temperature needs friction > 0");
}

PhaseState PhaseState::uniform(int sites, double q, double p) {
  require(sites >= 1, "PhaseState: need at least one site");
  return {std::vector<double>(static_cast<std::size_t>(sites), q),
          std::vector<double>(static_cast<std::size_t>(sites), p), 0.0};
}

void PhaseState::validate() const {
  require(!q.empty() && q.size() == p.size(), "PhaseState: q and p must be nonempty and equal in size");
  require(std::isfinite(t), "PhaseState: time must be finite");
  for (std::size_t i = 0; i < q.size(); ++i)
    require(std::isfinite(q[i]) && std::isfinite(p[i]), "PhaseState: coordinates must be finite");
}

std::vector<PhaseState> StroboscopicRecord::even_periods() const {
  std::vector<PhaseState> out;
  for (std::size_t n = 0; n < samples.size(); n += 2) out.push_back(samples[n]);
  return out;
}

core::StroboscopicSeries StroboscopicRecord::position_series(int site) const {
  require(!samples.empty(), "StroboscopicRecord: empty record");
  require(site >= 0 && site < samples.front().sites(), "StroboscopicRecord: site out of range");
  std::vector<double> values;
  values.reserve(samples.size());
  for (const auto& s : samples) values.push_back(s.q[site]);
  return core::StroboscopicSeries(std::move(values), period, "q_" + std::to_string(site));
}

ChainTrajectory integrate_chain_hamiltonian(const DriveParams& drive, const ChainParams& chain,
                                            const PhaseState& initial, int n_periods,
                                            IntegrationOptions options) {
  ChainIntegrator integrator(drive, chain, initial, options);
  return run(integrator, n_periods, drive.period());
}

ChainTrajectory integrate_chain_langevin(const DriveParams& drive, const ChainParams& chain,
                                         const BathParams& bath, const PhaseState& initial,
                                         int n_periods, core::RandomSource& rng,
                                         IntegrationOptions options) {
  ChainIntegrator integrator(drive, chain, initial, options, bath, &rng);
  return run(integrator, n_periods, drive.period());
}

double undriven_energy(const DriveParams& drive, const ChainParams& chain, const PhaseState& state) {
  require(state.sites() == chain.sites, "undriven_energy: state size differs from chain size");
  const double w2 = drive.omega0 * drive.omega0;
  double e = 0.0;
  for (int i = 0; i < state.sites(); ++i) {
    const double q2 = state.q[i] * state.q[i];
    e += 0.5 * state.p[i] * state.p[i] + 0.5 * w2 * q2 + 0.25 * drive.kappa * q2 * q2;
  }
  for (const auto& [i, j] : bonds(chain)) {
    const double d = state.q[i] - state.q[j];
    e -= chain.coupling * d * d;
  }
  return e;
}

double resonant_action_estimate(const DriveParams& drive) {
  if (drive.kappa <= 0.0) return 0.0;
  const double half = 0.5 * drive.omega_d;
  const double w2 = drive.omega0 * drive.omega0;
  // q = A cos(omega_d t / 2 + phi), balanced at the first harmonic.
  const double a2 = 4.0 / (3.0 * drive.kappa) * (half * half - w2 + 0.5 * w2 * std::abs(drive.delta));
  if (a2 <= 0.0) return 0.0;
  return 0.25 * a2 * (1.0 + half * half);
}

double measured_resonant_action(const StroboscopicRecord& record) {
  require(!record.samples.empty(), "measured_resonant_action: empty record");
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : record.samples)
    for (int i = 0; i < s.sites(); ++i) {
      sum += 0.5 * (s.q[i] * s.q[i] + s.p[i] * s.p[i]);
      ++count;
    }
  return sum / static_cast<double>(count);
}

RotatingFrame rotating_frame(const PhaseState& state, double omega_d) {
  RotatingFrame out;
  const std::complex<double> frame = std::polar(1.0, -0.5 * omega_d * state.t);
  for (int i = 0; i < state.sites(); ++i) {
    const double q = state.q[i], p = state.p[i];
    out.action.push_back(0.5 * (q * q + p * p));
    if (q == 0.0 && p == 0.0)
      out.angle.push_back(std::nullopt);
    else
      out.angle.push_back(std::arg(std::complex<double>(q, -p) * frame));
  }
  return out;
}

}  // namespace tcsim::oscillator
