#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tcsim/core/random.hpp"

namespace tcsim::cdw {

/// theta'' + theta' / (omega0 tau) + sin theta = E(t) / E_T, with
/// E(t) = E_dc + E_ac cos(omega_d t) and time in units of 1 / omega0.
/// The overdamped reduction drops theta'': theta' = omega0 tau (E(t) / E_T - sin theta).
struct PhaseEomParams {
  double omega0_tau = 1.0;
  double e_threshold = 1.0;
  double e_dc = 0.0;
  double e_ac = 0.0;
  double omega_d = 1.0;
  bool inertial = true;

  double drive(double t) const;  // E(t) / E_T
  double drive_period() const;
  void validate() const;
};

struct PhaseState {
  double theta = 0.0;
  double velocity = 0.0;  // ignored by the overdamped model
};

struct PhaseIntegration {
  double t_max = 0.0;          // at least 200 drive periods when E_ac != 0
  int substeps = 128;          // samples per drive period; fixed steps for T > 0
  double temperature = 0.0;    // Langevin noise on the force
  double abs_tolerance = 1e-10;
  double rel_tolerance = 1e-10;
};

struct PhaseRun {
  std::vector<double> times;
  std::vector<double> theta;   // one sample per substep
  double winding_rate = 0.0;   // <theta'> over the averaging window
  double endpoint_rate = 0.0;  // (theta(end) - theta(start)) / duration
  double window_start = 0.0;
  PhaseState final_state;
};

/// Deterministic runs use an adaptive Dormand-Prince 5(4) pair; T > 0 uses
/// Euler-Maruyama with `substeps` steps per period and needs `rng`.
/// The averaging window is the second half of the run, trimmed to a whole
/// multiple of 12 drive periods. Deterministic runs average theta' with the
/// bump weight exp(-1 / (s (1 - s))), s in [0, 1] across the window; noisy
/// runs report the endpoint winding.
PhaseRun integrate_phase(const PhaseEomParams& params, const PhaseIntegration& integration,
                         const PhaseState& initial = {}, core::RandomSource* rng = nullptr);

struct Plateau {
  int p = 0, q = 1;
  double center = 0.0;
  double width = 0.0;
};

struct StaircaseResult {
  std::vector<double> e_dc;
  std::vector<double> winding_rate;
  std::vector<double> differential;  // d<theta'>/dE_dc, centered differences
  std::vector<Plateau> plateaus;
};

struct IvOptions {
  bool warm_start = true;
  std::vector<std::pair<int, int>> candidates{{0, 1}, {1, 4}, {1, 3}, {1, 2}, {2, 3}, {3, 4}, {1, 1},
                                              {3, 2}, {2, 1}, {5, 2}, {3, 1}};
  double lock_tolerance = -1.0;  // negative: 1e-3 omega_d
};

/// Fills winding_rate and differential, then the plateaus for `candidates`.
StaircaseResult iv_curve(const PhaseEomParams& params, std::span<const double> e_dc_grid,
                         const PhaseIntegration& integration, const IvOptions& options = {},
                         core::RandomSource* rng = nullptr);

/// For each (p, q): the widest contiguous run of grid points with
/// |rate - (p / q) omega_d| < lock_tolerance; width is the E_dc span of that run.
/// Zero-width runs are not reported.
std::vector<Plateau> detect_plateaus(const StaircaseResult& staircase,
                                     std::span<const std::pair<int, int>> candidates, double omega_d,
                                     double lock_tolerance);
std::optional<Plateau> find_plateau(const std::vector<Plateau>& plateaus, int p, int q);

/// theta_i' = omega0 tau [E(t) / E_T - sin(theta_i + beta_i) + K (theta_{i+1} + theta_{i-1} - 2 theta_i)],
/// periodic in i.
struct ChainCdwParams {
  int n = 1;
  double stiffness = 0.0;
  std::vector<double> beta;  // pinning phases, size n

  /// Pinning phases uniform on [0, 2 pi).
  static ChainCdwParams random(int n, double stiffness, core::RandomSource& rng);
  void validate() const;
};

struct ChainRun {
  std::vector<double> theta;   // final phases
  double winding_rate = 0.0;   // spatial mean of <theta_i'>, estimated as for a single phase
  double endpoint_rate = 0.0;
};

/// Uses e_dc, e_ac, omega_d, omega0_tau of `drive`; drive.inertial must be false.
ChainRun integrate_chain(const ChainCdwParams& chain, const PhaseEomParams& drive,
                         const PhaseIntegration& integration, std::span<const double> initial = {},
                         core::RandomSource* rng = nullptr);

StaircaseResult chain_iv(const ChainCdwParams& chain, const PhaseEomParams& drive,
                         std::span<const double> e_dc_grid, const PhaseIntegration& integration,
                         const IvOptions& options = {}, core::RandomSource* rng = nullptr);

struct JunctionParams {
  double critical_current = 1.0;
  double normal_resistance = 1.0;
  double capacitance = 0.0;
  double i_dc = 0.0;
  double i_ac = 0.0;
  double omega_d = 1.0;
};

/// omega_p = sqrt(2 I_c / C), omega_c = 2 I_c R_N. With C > 0 time is rescaled
/// by omega_p, so omega0 tau = omega_c / omega_p; with C = 0 the model is
/// overdamped and time is rescaled by omega_c (omega0 tau = 1). E / E_T = I / I_c.
PhaseEomParams rcsj_map(const JunctionParams& junction);
/// The frequency used to rescale time in rcsj_map.
double rcsj_frequency_scale(const JunctionParams& junction);

}  // namespace tcsim::cdw
