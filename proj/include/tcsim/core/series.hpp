#pragma once

#include <span>
#include <string>
#include <vector>

namespace tcsim::core {

/// Samples of one observable at stroboscopic times n * period, n = 0, 1, ...
class StroboscopicSeries {
 public:
  StroboscopicSeries(std::vector<double> values, double period = 1.0, std::string label = {});

  std::span<const double> values() const { return values_; }
  double operator[](std::size_t n) const { return values_[n]; }
  std::size_t size() const { return values_.size(); }
  double period() const { return period_; }
  const std::string& label() const { return label_; }

 private:
  std::vector<double> values_;
  double period_;
  std::string label_;
};

}  // namespace tcsim::core
