#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <type_traits>
#include <vector>

#include "tcsim/core/errors.hpp"
#include "tcsim/core/random.hpp"

namespace tcsim::core {

/// Component-wise mean and standard error of the mean.
struct Aggregate {
  std::vector<double> mean;
  std::vector<double> standard_error;
};

/// Sequential reduction in the given order; replicas must have equal length.
Aggregate aggregate(std::span<const std::vector<double>> replicas);

template <class Result>
struct EnsembleResult {
  std::vector<std::uint64_t> seeds;  // ascending
  std::vector<Result> results;       // results[i] belongs to seeds[i]
  /// Filled when Result is double or std::vector<double>.
  std::optional<Aggregate> summary;
};

struct EnsembleOptions {
  /// Scheduling only; 0 means hardware concurrency. Never changes results.
  unsigned workers = 1;
};

/// Runs `experiment(RandomSource&)` once per seed with RandomSource(seed).
///
/// Replicas may execute concurrently, but results are stored by ascending
/// seed and reduced sequentially, so output is bit-identical for any worker
/// count. Throws PreconditionError on duplicate seeds; the first exception
/// thrown by a replica is rethrown after all workers join.
template <class Experiment>
auto ensemble_run(std::span<const std::uint64_t> seeds, Experiment&& experiment,
                  EnsembleOptions options = {})
    -> EnsembleResult<std::invoke_result_t<Experiment&, RandomSource&>> {
  using Result = std::invoke_result_t<Experiment&, RandomSource&>;

  std::vector<std::uint64_t> sorted(seeds.begin(), seeds.end());
  std::ranges::sort(sorted);
  require(std::ranges::adjacent_find(sorted) == sorted.end(), "ensemble_run: duplicate seeds");

  std::vector<std::optional<Result>> slots(sorted.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < sorted.size(); i = next++) {
      try {
        RandomSource rng(sorted[i]);
        slots[i].emplace(experiment(rng));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  unsigned workers = options.workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                          : options.workers;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, sorted.size())));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  EnsembleResult<Result> out;
  out.seeds = std::move(sorted);
  out.results.reserve(slots.size());
  for (auto& slot : slots) out.results.push_back(std::move(*slot));

  if constexpr (std::is_same_v<Result, double>) {
    std::vector<std::vector<double>> rows;
    for (double r : out.results) rows.push_back({r});
    out.summary = aggregate(rows);
  } else if constexpr (std::is_same_v<Result, std::vector<double>>) {
    out.summary = aggregate(out.results);
  }
  return out;
}

/// Convenience: seeds first, first+1, ..., first+count-1.
std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count);

}  // namespace tcsim::core
