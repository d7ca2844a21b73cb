#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "tcsim/core/series.hpp"
#include "tcsim/core/spectral.hpp"
#include "tcsim/pca/lattice.hpp"

namespace tcsim::pca {

/// sigma(x, y) <- maj(sigma(x, y), sigma(x + 1, y), sigma(x, y + 1))
struct ToomNEC {};
/// Negated NEC majority.
struct PiToom {};
/// Heat-bath kinetic Ising model, H = -J sum_<ij> s_i s_j - h sum_i s_i.
/// One step is a full sweep: even checkerboard sublattice, then odd.
struct GlauberIsing {
  double temperature = 1.0;
  double field = 0.0;
  double coupling = 1.0;
};
struct Rotated;

using PcaRule = std::variant<ToomNEC, PiToom, GlauberIsing, Rotated>;

/// Base update followed by the global Z_m increment.
struct Rotated {
  std::shared_ptr<const PcaRule> base;
  int m = 2;
};

PcaRule make_rotated_rule(const PcaRule& base, int m);

/// Deterministic step of a binary lattice (ToomNEC, PiToom, or Rotated over a
/// deterministic base with m = 2). Synchronous, into a fresh buffer.
SpinLattice2D step_rule(const SpinLattice2D& lattice, const PcaRule& rule);
/// Any rule; GlauberIsing draws from `rng`.
SpinLattice2D step_rule(const SpinLattice2D& lattice, const PcaRule& rule, core::RandomSource& rng);
/// Z_m lattices: plurality over the NEC triple (self wins ties), for ToomNEC
/// or Rotated(ToomNEC, m) with m equal to the lattice alphabet.
ClockLattice2D step_rule(const ClockLattice2D& lattice, const PcaRule& rule);

SpinLattice2D apply_noise(const SpinLattice2D& lattice, const NoiseParams& noise, core::RandomSource& rng);
/// With probability `rate` per cell, replace the state by a uniform draw from
/// the other m - 1 states.
ClockLattice2D apply_clock_noise(const ClockLattice2D& lattice, double rate, core::RandomSource& rng);

/// Glauber rates matched to biased noise: in a fully aligned neighborhood the
/// heat-bath flip probability of an up spin is `down` and of a down spin is
/// `up`. With J = 1: 16/T = L_p + L_q, 4h/T = L_q - L_p, L = ln(1/eps - 1).
/// Requires 0 < up, down < 1/2.
GlauberIsing matched_glauber(const NoiseParams& noise);

/// Period-2 rules: PiToom and Rotated with m = 2.
bool period_two(const PcaRule& rule);

struct PcaRun {
  core::StroboscopicSeries magnetization{{0.0}};              // m(t), t = 0..steps
  std::optional<core::StroboscopicSeries> demodulated;        // (-1)^t m(t), period-2 rules
  std::optional<core::SpectralSummary> spectrum;              // of m(t) at nu = 1/2, period-2 rules
  SpinLattice2D final_state;
};

/// Rule step, then noise, `steps` times.
PcaRun run_pca(const SpinLattice2D& initial, const PcaRule& rule, const NoiseParams& noise, int steps,
               core::RandomSource& rng);

struct ClockRun {
  core::StroboscopicSeries order{{0.0}};  // Re mean exp(2 pi i s / m)
  core::SpectralSummary spectrum;         // at nu = 1/m
  ClockLattice2D final_state;
};

ClockRun run_clock(const ClockLattice2D& initial, const PcaRule& rule, double noise_rate, int steps,
                   core::RandomSource& rng);

/// A rule plus the noise applied after each step.
struct PcaModel {
  PcaRule rule;
  NoiseParams noise;
};

struct LifetimeResult {
  std::vector<std::uint64_t> seeds;
  std::vector<std::optional<long long>> flip_times;  // empty: censored at max_steps
  std::optional<double> median;                      // empty when the median is censored
  int censored = 0;
};

/// From all-up, the first step at which m(t) (demodulated for period-2 rules)
/// is negative.
LifetimeResult memory_lifetime(const PcaModel& model, int lx, int ly, long long max_steps,
                               std::span<const std::uint64_t> seeds, unsigned workers = 1);

struct Retention {
  double probability = 0.0;
  double standard_error = 0.0;
  std::vector<bool> retained;  // per seed, ascending
};

/// Fraction of seeds whose final m(t) (demodulated for period-2 rules) is
/// still positive after `steps`, starting all-up.
Retention retention(const PcaModel& model, int lx, int ly, int steps, std::span<const std::uint64_t> seeds,
                    unsigned workers = 1);

struct PhaseMap {
  std::vector<double> biases, amplitudes;
  std::vector<double> retention;  // row-major, one row per bias
  std::vector<double> standard_error;

  double at(std::size_t i_bias, std::size_t i_amplitude) const {
    return retention[i_bias * amplitudes.size() + i_amplitude];
  }
};

using ModelFactory = std::function<PcaModel(const NoiseParams&)>;

PcaModel toom_model(const NoiseParams& noise);
PcaModel pi_toom_model(const NoiseParams& noise);
PcaModel glauber_model(const NoiseParams& noise);  // matched_glauber, no extra noise

PhaseMap phase_scan(std::span<const double> biases, std::span<const double> amplitudes, const ModelFactory& model,
                    int lx, int ly, int steps, std::span<const std::uint64_t> seeds, unsigned workers = 1);

}  // namespace tcsim::pca
