#include "tcsim/core/ensemble.hpp"

namespace tcsim::core {

Aggregate aggregate(std::span<const std::vector<double>> replicas) {
  Aggregate out;
  if (replicas.empty()) return out;
  const std::size_t width = replicas.front().size();
  for (const auto& r : replicas) require(r.size() == width, "aggregate: ragged replica results");

  const double n = static_cast<double>(replicas.size());
  out.mean.assign(width, 0.0);
  out.standard_error.assign(width, 0.0);
  for (const auto& r : replicas)
    for (std::size_t k = 0; k < width; ++k) out.mean[k] += r[k];
  for (double& m : out.mean) m /= n;
  if (replicas.size() < 2) return out;
  for (const auto& r : replicas)
    for (std::size_t k = 0; k < width; ++k) {
      const double d = r[k] - out.mean[k];
      out.standard_error[k] += d * d;
    }
  for (double& s : out.standard_error) s = std::sqrt(s / (n - 1.0) / n);
  return out;
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = first + i;
  return seeds;
}

}  // namespace tcsim::core
