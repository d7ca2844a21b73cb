#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tcsim/core/series.hpp"

namespace tcsim::core {

struct FitResult {
  std::map<std::string, double> params;
  double residual = 0.0;  // sum of squared residuals in the fitted (log) space
  double r_squared = 0.0;
  /// Set when the fitted decay rate is not positive; `params` then carries no
  /// lifetime entry rather than an infinite one.
  bool divergent = false;
  std::vector<std::string> warnings;

  double param(const std::string& name) const;
  bool has(const std::string& name) const { return params.contains(name); }
};

/// Inclusive sample-index window. Unset ends mean "default": the first 10% of
/// samples are skipped as transient and the window runs to the last sample.
struct FitWindow {
  std::optional<std::size_t> n_min;
  std::optional<std::size_t> n_max;
};

/// Least-squares fit of ln(values[n]) = c - n / tau. Returns "tau" (periods)
/// and "amplitude"; a non-positive decay rate yields the divergent sentinel.
FitResult fit_exponential_decay(const StroboscopicSeries& envelope, FitWindow window = {});

/// Fits ln tau = ln A + Delta / T over (T, tau) pairs; returns "Delta", "A", "ln_A".
FitResult arrhenius_fit(std::span<const std::pair<double, double>> points);

/// Ordinary least squares y = intercept + slope * x.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double residual = 0.0;
  double r_squared = 0.0;
};
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace tcsim::core
