#include "doctest.h"

#include <cmath>
#include <vector>

#include "tcsim/core/random.hpp"

using tcsim::core::RandomSource;

TEST_CASE("philox4x32-10 known-answer vectors") {
  using tcsim::core::philox4x32_10;
  const auto zero = philox4x32_10({0, 0, 0, 0}, {0, 0});
  CHECK(zero == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  const auto ones = philox4x32_10({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u});
  CHECK(ones == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  const auto pi = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                {0xa4093822u, 0x299f31d0u});
  CHECK(pi == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("equal (seed, stream) reproduce the first 10^4 draws") {
  RandomSource a(12345, 7), b(12345, 7);
  for (int i = 0; i < 10000; ++i) REQUIRE(a.next_u32() == b.next_u32());
  RandomSource c(12345, 7), d(12345, 7);
  for (int i = 0; i < 10000; ++i) REQUIRE(c.normal() == d.normal());
}

TEST_CASE("distinct streams are uncorrelated") {
  RandomSource a(99, 0), b(99, 1);
  const int n = 200000;
  double sa = 0, sb = 0, sab = 0;
  int equal = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.uniform() - 0.5, y = b.uniform() - 0.5;
    sa += x;
    sb += y;
    sab += x * y;
    equal += (x == y);
  }
  // Var(xy) = 1/144, so the sample correlation has sigma ~ 1/sqrt(n).
  const double corr = (sab / n) / (1.0 / 12.0);
  CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(equal == 0);
}

TEST_CASE("uniform and normal moments") {
  RandomSource rng(2024);
  const int n = 400000;
  double su = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  const double root_n = std::sqrt(static_cast<double>(n));
  CHECK(std::abs(su / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0) / root_n);
  CHECK(std::abs(sn / n) < 4.0 / root_n);
  CHECK(std::abs(sn2 / n - 1.0) < 4.0 * std::sqrt(2.0) / root_n);
}

TEST_CASE("uniform_index covers its range without bias") {
  RandomSource rng(5);
  std::vector<int> counts(6, 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_index(6)];
  for (int c : counts) CHECK(std::abs(c - n / 6.0) < 4.0 * std::sqrt(n * (1.0 / 6) * (5.0 / 6)));
}

TEST_CASE("split children are deterministic and distinct from the parent") {
  RandomSource parent(77, 3);
  auto c1 = parent.split(1), c1b = parent.split(1), c2 = parent.split(2);
  CHECK(c1.stream_id() == c1b.stream_id());
  CHECK(c1.stream_id() != c2.stream_id());
  CHECK(c1.stream_id() != parent.stream_id());
  CHECK(c1.next_u64() == c1b.next_u64());
}
