#include <doctest.h>

#include <cmath>
#include <vector>

#include "hetcp/rng.hpp"

using namespace hetcp;

// Known-answer vectors from the Random123 distribution (kat_vectors, philox4x32_10).
TEST_CASE("philox4x32-10 known answers") {
  using B = RngStream::Block;
  CHECK(RngStream::philox(B{0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(RngStream::philox(B{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(RngStream::philox(B{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("stream output is the philox block of (counter, stream) under the seed key") {
  RngStream rng(0x0123456789abcdefULL, 5);
  const auto b0 = RngStream::philox({0, 0, 5, 0}, {0x89abcdefu, 0x01234567u});
  const auto b1 = RngStream::philox({1, 0, 5, 0}, {0x89abcdefu, 0x01234567u});
  CHECK(rng.next_u64() == ((std::uint64_t{b0[1]} << 32) | b0[0]));
  CHECK(rng.next_u64() == ((std::uint64_t{b0[3]} << 32) | b0[2]));
  CHECK(rng.next_u64() == ((std::uint64_t{b1[1]} << 32) | b1[0]));
}

TEST_CASE("same seed and stream reproduce; different streams differ") {
  RngStream a(42, 1), b(42, 1), c(42, 2), d(43, 1);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    differs_c |= va != c.next_u64();
    differs_d |= va != d.next_u64();
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("uniform draws stay in range with the right moments") {
  RngStream rng(3);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    const double v = rng.uniform_open();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
    sum += u;
    sum2 += u * u;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sum2 / n - mean * mean - 1.0 / 12.0) < 2e-3);
}

TEST_CASE("normal draws have mean 0 and variance 1") {
  RngStream rng(4);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    REQUIRE(std::isfinite(z));
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(sum2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("below is uniform over its range") {
  RngStream rng(5);
  const std::uint64_t k = 7;
  const int n = 70000;
  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) {
    const auto v = rng.below(k);
    REQUIRE(v < k);
    ++counts[v];
  }
  double chi2 = 0.0;
  const double expected = static_cast<double>(n) / k;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 22.5);  // chi-square(6) upper 0.001 point
  CHECK(rng.below(1) == 0);
}

TEST_CASE("derived seeds are distinct and stable") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  CHECK(mix64(1) != mix64(2));
}
