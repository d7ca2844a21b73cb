#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tcsim/core/ensemble.hpp"
#include "tcsim/core/series.hpp"
#include "tcsim/quantum/floquet.hpp"
#include "tcsim/quantum/state.hpp"

namespace tcsim::quantum {

enum class Axis { x, z };

struct MagnetizationTrajectory {
  /// <sigma^a_i(nT)>, n = 0..n_periods
  std::vector<core::StroboscopicSeries> site_expectation;
  /// <sigma^a_i(nT)> <sigma^a_i(0)>
  std::vector<core::StroboscopicSeries> site_autocorrelation;
  /// M(n) = (1/L) sum_i <sigma^a_i(nT)> <sigma^a_i(0)>
  core::StroboscopicSeries average;
};

MagnetizationTrajectory magnetization_trajectory(const FloquetStepper& stepper,
                                                 const StateVector& initial, int n_periods,
                                                 Axis axis = Axis::z);

struct FloquetOperator {
  Eigen::MatrixXcd matrix;
  double period = 1.0;
  /// max |(U^H U - I)_ij|
  double unitarity_defect() const;
};

/// Dense one-period propagator assembled column by column from the stepper.
FloquetOperator floquet_operator(const FloquetStepper& stepper);

struct QuasienergySpectrum {
  double period = 1.0;
  Eigen::VectorXd eigenphases;  // (-pi, pi]; quasienergy = phase / period
  Eigen::MatrixXcd eigenvectors;
  std::vector<int> partner;          // involution
  std::vector<double> splittings;    // |wrap(theta_j - theta_partner - pi)|
  /// sqrt(tr(P X P X) / 2) with P the projector on {psi_j, psi_partner}; 1 when
  /// the pair is (|s> + e^{i phi}|Xs>, |s> - e^{i phi}|Xs>) for any phi.
  std::vector<double> cat_overlaps;

  double quasienergy(int j) const { return eigenphases(j) / period; }
  /// One value per matched pair (j < partner).
  std::vector<double> pair_splittings() const;
};

/// Wraps an angle to (-pi, pi].
double wrap_phase(double angle);

/// Diagonalizes the dense Floquet operator (L <= 10) and pairs eigenstates by
/// greedy maximum cat overlap (ties go to the smaller splitting). Throws
/// NumericalError if ||U^H U - I||_max >= 1e-8.
QuasienergySpectrum floquet_spectrum(const FloquetStepper& stepper);
QuasienergySpectrum floquet_spectrum(const SpinChainParams& params);

/// n forward periods, then n inverse periods; returns |<initial|final>|^2.
double echo_benchmark(const FloquetStepper& stepper, const StateVector& initial, int n_periods);
/// |<initial| U^n |initial>|^2 without the reversal.
double forward_return_probability(const FloquetStepper& stepper, const StateVector& initial,
                                  int n_periods);

struct VarianceScanResult {
  std::vector<double> epsilons;
  std::vector<double> variance;        // of per-site nu = 1/2 amplitudes
  std::vector<double> mean_amplitude;
  double peak_epsilon = 0.0;
};

struct VarianceScanOptions {
  int n_periods = 100;
  unsigned workers = 1;
};

/// For every epsilon, realizes one disorder draw and one random bit-string per
/// seed, evolves n_periods and collects the nu = 1/2 amplitude of each site's
/// z autocorrelator. The variance over sites and realizations is reported;
/// its arg-max estimates the phase boundary.
VarianceScanResult variance_peak_scan(std::span<const double> epsilons, const ChainTemplate& recipe,
                                      std::span<const std::uint64_t> seeds,
                                      VarianceScanOptions options = {});

}  // namespace tcsim::quantum
