#include "tcsim/core/fit.hpp"

#include <algorithm>
#include <cmath>

#include "tcsim/core/errors.hpp"

namespace tcsim::core {

namespace {
// Rates below this (per period) are indistinguishable from round-off on
// constant envelopes and are reported as divergent lifetimes.
constexpr double kMinDecayRate = 1e-12;
}  // namespace

double FitResult::param(const std::string& name) const {
  const auto it = params.find(name);
  if (it == params.end()) throw PreconditionError("FitResult: no parameter '" + name + "'");
  return it->second;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "fit_line: size mismatch");
  require(x.size() >= 2, "fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x, dy = y[i] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  require(sxx > 0.0, "fit_line: abscissae are all equal");

  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    fit.residual += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - fit.residual / syy, 0.0, 1.0) : 1.0;
  return fit;
}

FitResult fit_exponential_decay(const StroboscopicSeries& envelope, FitWindow window) {
  const std::size_t size = envelope.size();
  const std::size_t lo = window.n_min.value_or(size / 10);
  const std::size_t hi = std::min(window.n_max.value_or(size - 1), size - 1);
  require(lo <= hi && hi - lo + 1 >= 4,
          "fit_exponential_decay: fit window must contain at least 4 samples");

  std::vector<double> n, log_v;
  for (std::size_t i = lo; i <= hi; ++i) {
    require(envelope[i] > 0.0, "fit_exponential_decay: sample " + std::to_string(i) +
                                   " is not strictly positive");
    n.push_back(static_cast<double>(i));
    log_v.push_back(std::log(envelope[i]));
  }

  const LinearFit line = fit_line(n, log_v);
  FitResult result;
  result.residual = line.residual;
  result.r_squared = line.r_squared;
  result.params["amplitude"] = std::exp(line.intercept);
  result.params["rate"] = -line.slope;
  if (-line.slope <= kMinDecayRate) {
    result.divergent = true;
  } else {
    result.params["tau"] = -1.0 / line.slope;
  }
  return result;
}

FitResult arrhenius_fit(std::span<const std::pair<double, double>> points) {
  require(points.size() >= 3, "arrhenius_fit: at least 3 (T, tau) points required");
  std::vector<double> inv_t, log_tau;
  for (const auto& [temperature, tau] : points) {
    require(temperature > 0.0 && tau > 0.0, "arrhenius_fit: T and tau must be positive");
    require(std::isfinite(temperature) && std::isfinite(tau), "arrhenius_fit: non-finite point");
    inv_t.push_back(1.0 / temperature);
    log_tau.push_back(std::log(tau));
  }
  const LinearFit line = fit_line(inv_t, log_tau);
  FitResult result;
  result.residual = line.residual;
  result.r_squared = line.r_squared;
  result.params["Delta"] = line.slope;
  result.params["ln_A"] = line.intercept;
  result.params["A"] = std::exp(line.intercept);
  return result;
}

}  // namespace tcsim::core
