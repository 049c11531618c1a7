#include "doctest.h"

#include <set>

#include "anderson/rng.hpp"

using namespace anderson;

TEST_CASE("philox known answers") {
  using philox::block;
  CHECK(block({0, 0, 0, 0}, {0, 0}) ==
        philox::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
              {0xffffffffu, 0xffffffffu}) ==
        philox::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
              {0xa4093822u, 0x299f31d0u}) ==
        philox::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct") {
  RandomStream a(42, 7);
  RandomStream b(42, 7);
  RandomStream c(42, 8);
  RandomStream d(43, 7);
  bool differs_c = false;
  bool differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u32();
    CHECK(x == b.next_u32());
    differs_c |= x != c.next_u32();
    differs_d |= x != d.next_u32();
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("uniform variates stay in range and have the right mean") {
  RandomStream rng(1, 0);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double v = rng.uniform_pos();
    REQUIRE(v > 0.0);
    REQUIRE(v <= 1.0);
    sum += u;
    sq += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sq / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12).epsilon(0.02));
}

TEST_CASE("normal variates have unit variance") {
  RandomStream rng(3, 1);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("block counter advances every four words") {
  RandomStream rng(5, 5);
  CHECK(rng.blocks_consumed() == 0);
  for (int i = 0; i < 4; ++i) rng.next_u32();
  CHECK(rng.blocks_consumed() == 1);
  rng.next_u32();
  CHECK(rng.blocks_consumed() == 2);
}
