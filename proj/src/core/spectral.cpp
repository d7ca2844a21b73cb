#include "tcsim/core/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "tcsim/core/errors.hpp"

namespace tcsim::core {

SpectralSummary::SpectralSummary(std::vector<double> signal, std::vector<double> frequencies,
                                 std::vector<double> amplitudes, int m)
    : signal_(std::move(signal)),
      frequencies_(std::move(frequencies)),
      amplitudes_(std::move(amplitudes)),
      m_(m),
      subharmonic_(dft_amplitude(signal_, 1.0 / m)) {}

double SpectralSummary::peak_at(double nu) const { return dft_amplitude(signal_, nu); }

double dft_amplitude(std::span<const double> signal, double nu) {
  // Reduce nu * n modulo 1 before taking sin/cos so long series keep full
  // phase accuracy.
  std::complex<double> sum{0.0, 0.0};
  for (std::size_t n = 0; n < signal.size(); ++n) {
    const double turns = nu * static_cast<double>(n);
    const double phase = 2.0 * std::numbers::pi * (turns - std::floor(turns));
    sum += signal[n] * std::complex<double>(std::cos(phase), -std::sin(phase));
  }
  return std::abs(sum) / static_cast<double>(signal.size());
}

SpectralSummary dft_subharmonic(const StroboscopicSeries& series, int m) {
  require(m >= 1, "dft_subharmonic: m must be positive");
  const std::size_t n = series.size();
  require(n >= 2 * static_cast<std::size_t>(m),
          "dft_subharmonic: series length " + std::to_string(n) + " shorter than 2m = " +
              std::to_string(2 * m));

  std::vector<std::complex<double>> twiddle(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    twiddle[j] = {std::cos(phase), -std::sin(phase)};
  }

  const auto values = series.values();
  std::vector<double> frequencies(n), amplitudes(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> sum{0.0, 0.0};
    std::size_t index = 0;  // (k * j) mod n, updated incrementally
    for (std::size_t j = 0; j < n; ++j) {
      sum += values[j] * twiddle[index];
      index += k;
      if (index >= n) index -= n;
    }
    frequencies[k] = static_cast<double>(k) / static_cast<double>(n);
    amplitudes[k] = std::abs(sum) / static_cast<double>(n);
  }
  return SpectralSummary({values.begin(), values.end()}, std::move(frequencies),
                         std::move(amplitudes), m);
}

std::vector<double> subharmonic_amplitudes(std::span<const StroboscopicSeries> series, int m) {
  std::vector<double> out;
  out.reserve(series.size());
  for (const auto& s : series) {
    require(s.size() >= 2 * static_cast<std::size_t>(m), "subharmonic_amplitudes: series too short");
    out.push_back(dft_amplitude(s.values(), 1.0 / m));
  }
  return out;
}

}  // namespace tcsim::core
