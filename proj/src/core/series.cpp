#include "tcsim/core/series.hpp"

#include <algorithm>
#include <cmath>

#include "tcsim/core/errors.hpp"

namespace tcsim::core {

StroboscopicSeries::StroboscopicSeries(std::vector<double> values, double period,
                                       std::string label)
    : values_(std::move(values)), period_(period), label_(std::move(label)) {
  require(!values_.empty(), "StroboscopicSeries: at least one sample required");
  require(std::ranges::all_of(values_, [](double v) { return std::isfinite(v); }),
          "StroboscopicSeries: non-finite sample in '" + label_ + "'");
  require(period_ > 0.0, "StroboscopicSeries: period must be positive");
}

}  // namespace tcsim::core
