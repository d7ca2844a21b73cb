#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tcsim/core/fit.hpp"
#include "tcsim/core/series.hpp"
#include "tcsim/oscillator/chain.hpp"

namespace tcsim::oscillator {

enum class Binarization {
  position_sign,  // sign q_i
  angle_sign,     // sign sin Q_i in the rotating frame
};

struct DomainWalls {
  std::vector<std::vector<int>> spins;  // per snapshot, +-1 (zero maps to +1)
  std::vector<std::vector<int>> walls;  // per snapshot, bond index i of the pair (i, i+1 mod N)
  std::vector<int> counts;
  double mean_density() const;  // walls per bond, averaged over snapshots
};

/// Binarizes snapshots taken at even periods.
DomainWalls domain_wall_extract(std::span<const PhaseState> snapshots, Boundary boundary,
                                Binarization mode = Binarization::position_sign,
                                double omega_d = 2.0);

/// C(n) = (1/N) sum_i q_i(nT) q_i(0) for one record.
std::vector<double> stroboscopic_autocorrelation(const StroboscopicRecord& record);

struct AutocorrelationOptions {
  /// The fit stops before the first sample at or after `transient` whose
  /// envelope is below this fraction of the envelope at n = 0, and before
  /// any non-positive sample.
  double cutoff = 0.1;
  int transient = 10;
  /// Lifetimes longer than this multiple of the fitted span are reported as
  /// divergent.
  double resolvable_factor = 100.0;
};

struct AutocorrelationResult {
  std::vector<double> correlation;  // C(n)
  std::vector<double> envelope;     // (-1)^n C(n) / C(0)
  core::FitResult fit;              // "tau" in periods, or divergent
};

/// Site- and ensemble-averaged autocorrelation, demodulated by (-1)^n and
/// fitted with an exponential envelope.
AutocorrelationResult ttsb_autocorrelation(std::span<const StroboscopicRecord> records,
                                           AutocorrelationOptions options = {});
/// Same analysis on a precomputed C(n).
AutocorrelationResult ttsb_autocorrelation(std::span<const double> correlation,
                                           AutocorrelationOptions options = {});

struct ArrheniusSetup {
  DriveParams drive;
  ChainParams chain;
  double friction = 0.1;
  PhaseState initial;
  int burn_in_periods = 200;
  /// C(n) for n <= max_lag is averaged over time origins m = 0, stride, ...
  /// up to record_periods - max_lag, over sites and over seeds.
  int record_periods = 4000;
  int max_lag = 1000;
  int origin_stride = 4;
  IntegrationOptions integration;
  AutocorrelationOptions autocorrelation;
  std::vector<std::uint64_t> seeds;
  unsigned workers = 1;
};

struct ArrheniusScan {
  std::vector<double> temperatures;
  std::vector<std::optional<double>> lifetimes;  // empty when divergent or invalid
  core::FitResult fit;                           // "Delta", "A", "ln_A"
};

/// Langevin runs at each temperature (same seeds everywhere), lifetime from
/// ttsb_autocorrelation, then arrhenius_fit over the finite lifetimes.
ArrheniusScan arrhenius_scan(std::span<const double> temperatures, const ArrheniusSetup& setup);
/// Same bookkeeping with an injected lifetime model.
ArrheniusScan arrhenius_scan(std::span<const double> temperatures,
                             const std::function<core::FitResult(double)>& lifetime);

struct HeatingOptions {
  double max_time = 1e4;  // integration budget per frequency
  int substeps = 128;
  double plateau_fraction = 0.2;  // trailing share of samples averaged into the plateau
  /// Plateaus less than (1 + min_rise) |E(0)| above E(0) count as micromotion
  /// and are censored; so is any fall in energy.
  double min_rise = 0.5;
};

struct HeatingPoint {
  double omega_d = 0.0;
  std::optional<double> t_star;  // empty when censored
  double initial_energy = 0.0;
  double plateau_energy = 0.0;
  core::StroboscopicSeries energy{{0.0}};  // E_eff(nT)
  bool censored() const { return !t_star.has_value(); }
};

/// t* per drive frequency: first stroboscopic time at which the undriven
/// energy crosses the midpoint between its initial value and its late-time
/// plateau.
std::vector<HeatingPoint> heating_time(const DriveParams& drive, const ChainParams& chain,
                                       const PhaseState& initial, std::span<const double> omega_grid,
                                       HeatingOptions options = {});

}  // namespace tcsim::oscillator
