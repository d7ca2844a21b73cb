#pragma once

#include <span>
#include <vector>

#include "tcsim/core/series.hpp"

namespace tcsim::core {

/// Normalized DFT amplitudes |sum_n x_n e^{-2 pi i nu n}| / N on the grid
/// nu = k / N, k = 0..N-1 (nu in units of the drive frequency).
///
/// With this normalization a pure period-m signal such as (-1)^n has unit
/// amplitude at nu = 1/m, and the squared amplitudes sum to the mean square of
/// the signal (Parseval).
class SpectralSummary {
 public:
  SpectralSummary(std::vector<double> signal, std::vector<double> frequencies,
                  std::vector<double> amplitudes, int m);

  std::span<const double> frequencies() const { return frequencies_; }
  std::span<const double> amplitudes() const { return amplitudes_; }
  int harmonic_denominator() const { return m_; }

  /// Amplitude at an arbitrary frequency, evaluated directly from the signal.
  double peak_at(double nu) const;
  /// Amplitude at nu = 1/m.
  double subharmonic_amplitude() const { return subharmonic_; }

 private:
  std::vector<double> signal_;
  std::vector<double> frequencies_;
  std::vector<double> amplitudes_;
  int m_;
  double subharmonic_;
};

/// Requires series.size() >= 2m.
SpectralSummary dft_subharmonic(const StroboscopicSeries& series, int m);

/// Direct single-frequency amplitude (same normalization as above).
double dft_amplitude(std::span<const double> signal, double nu);

/// Site-resolved subharmonic amplitudes for a family of series.
std::vector<double> subharmonic_amplitudes(std::span<const StroboscopicSeries> series, int m);

}  // namespace tcsim::core
