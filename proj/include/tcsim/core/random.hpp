#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace tcsim::core {

/// Philox4x32-10 block function (Salmon et al. counter-based generator).
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Deterministic, splittable random source.
///
/// Every draw is a pure function of (master_seed, stream_id, counter): the seed
/// is the Philox key, the stream id occupies the upper half of the counter and
/// a block index the lower half. Two sources built from the same pair produce
/// the same sequence on every platform; distinct streams never share a counter
/// block.
///
/// Satisfies UniformRandomBitGenerator so it can feed <random> distributions,
/// although the member samplers below are preferred for reproducibility
/// (libstdc++ and libc++ implement std distributions differently).
class RandomSource {
 public:
  using result_type = std::uint32_t;

  explicit RandomSource(std::uint64_t master_seed, std::uint64_t stream_id = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u32(); }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Unbiased integer on [0, n) by rejection; n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal via Box-Muller (pairs are cached).
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  /// Independent child source on a derived stream of the same seed.
  RandomSource split(std::uint64_t child) const;

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }
  /// Number of 128-bit blocks consumed so far.
  std::uint64_t block_counter() const { return block_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int position_ = 4;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

/// SplitMix64 finalizer; used to derive stream ids.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace tcsim::core
