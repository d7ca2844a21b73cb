#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "tcsim/core/random.hpp"
#include "tcsim/core/series.hpp"

namespace tcsim::oscillator {

/// H_i = p^2/2 + (omega0^2/2)(1 + delta cos(omega_d t)) q^2 + (kappa/4) q^4
struct DriveParams {
  double omega0 = 1.0;
  double delta = 0.0;
  double omega_d = 2.0;
  double kappa = 0.0;

  void validate() const;
  double period() const;
  double stiffness(double t) const;  // omega0^2 (1 + delta cos(omega_d t))
};

enum class Boundary { periodic, open };

/// Adds -coupling * sum_bonds (q_i - q_j)^2 to the Hamiltonian, so a negative
/// coupling is an elastic (aligning) spring.
struct ChainParams {
  int sites = 1;
  double coupling = 0.0;
  Boundary boundary = Boundary::periodic;

  void validate() const;
};

struct BathParams {
  double friction = 0.0;
  double temperature = 0.0;

  void validate() const;
};

struct PhaseState {
  std::vector<double> q, p;
  double t = 0.0;

  static PhaseState uniform(int sites, double q, double p);
  int sites() const { return static_cast<int>(q.size()); }
  void validate() const;
};

/// Snapshots at t = nT, n = 0..periods.
struct StroboscopicRecord {
  double period = 1.0;
  std::vector<PhaseState> samples;

  int periods() const { return static_cast<int>(samples.size()) - 1; }
  /// Samples at 2nT.
  std::vector<PhaseState> even_periods() const;
  core::StroboscopicSeries position_series(int site) const;
};

struct IntegrationOptions {
  int substeps = 128;
  /// |q_i| above this ends the run as a blow-up; 0 selects
  /// 1e3 * sqrt(2 P*) from the resonant-action estimate.
  double blowup_bound = 0.0;
};

struct ChainTrajectory {
  StroboscopicRecord record;
  PhaseState final_state;
  bool blew_up = false;
  int blowup_period = -1;
};

/// Period-by-period integrator. Without a bath (or with friction =
/// temperature = 0) it is velocity Verlet; otherwise BAOAB with an exact
/// Ornstein-Uhlenbeck momentum step, drawing noise from `rng`.
class ChainIntegrator {
 public:
  ChainIntegrator(const DriveParams& drive, const ChainParams& chain, const PhaseState& initial,
                  IntegrationOptions options = {}, const BathParams& bath = {},
                  core::RandomSource* rng = nullptr);

  /// Returns false (and stops) once the blow-up bound is crossed.
  bool advance_period();
  const PhaseState& state() const { return state_; }
  bool blown_up() const { return blown_up_; }
  long long periods_done() const { return periods_; }
  double bound() const { return bound_; }

 private:
  void force(double t);
  void verlet_step(double t_next);
  void baoab_step(double t_next);

  DriveParams drive_;
  std::vector<std::pair<int, int>> bonds_;
  double spring_;
  PhaseState state_;
  std::vector<double> f_;
  int substeps_;
  double t0_, period_, h_, bound_;
  double decay_ = 1.0, kick_ = 0.0;
  bool stochastic_ = false;
  core::RandomSource* rng_;
  long long periods_ = 0;
  bool blown_up_ = false;
};

/// Velocity Verlet.
ChainTrajectory integrate_chain_hamiltonian(const DriveParams& drive, const ChainParams& chain,
                                            const PhaseState& initial, int n_periods,
                                            IntegrationOptions options = {});

/// BAOAB splitting with an exact Ornstein-Uhlenbeck momentum step. With
/// friction = temperature = 0 the update is identical to velocity Verlet.
ChainTrajectory integrate_chain_langevin(const DriveParams& drive, const ChainParams& chain,
                                         const BathParams& bath, const PhaseState& initial,
                                         int n_periods, core::RandomSource& rng,
                                         IntegrationOptions options = {});

/// Hamiltonian with delta = 0.
double undriven_energy(const DriveParams& drive, const ChainParams& chain, const PhaseState& state);

/// Harmonic-balance action of the period-doubled orbit, 0 outside the
/// tongue or for kappa = 0.
double resonant_action_estimate(const DriveParams& drive);
/// Mean P = (q^2 + p^2)/2 over every site and sample of a record.
double measured_resonant_action(const StroboscopicRecord& record);

struct RotatingFrame {
  std::vector<std::optional<double>> angle;  // Q_i; empty when q = p = 0
  std::vector<double> action;                // P_i
};

/// Q_i = arg[(q_i - i p_i) e^{-i omega_d t / 2}], P_i = (q_i^2 + p_i^2) / 2.
RotatingFrame rotating_frame(const PhaseState& state, double omega_d);

}  // namespace tcsim::oscillator
