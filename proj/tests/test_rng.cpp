#include <doctest.h>

#include <set>

#include "collapse/rng.hpp"

using namespace collapse;

TEST_SUITE("rng") {
  TEST_CASE("Philox4x32-10 known answers") {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}) ==
          C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                               K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                               K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  }

  TEST_CASE("draws are pure functions of their coordinates") {
    const StreamRng a(42), b(42), c(43), d(42, 1);
    CHECK(a.bits(7, DrawPurpose::Vertex) == b.bits(7, DrawPurpose::Vertex));
    CHECK(a.bits(7, DrawPurpose::Vertex) != a.bits(7, DrawPurpose::Outcome));
    CHECK(a.bits(7, DrawPurpose::Vertex) != a.bits(8, DrawPurpose::Vertex));
    CHECK(a.bits(7, DrawPurpose::Vertex) != c.bits(7, DrawPurpose::Vertex));
    CHECK(a.bits(7, DrawPurpose::Vertex) != d.bits(7, DrawPurpose::Vertex));
    CHECK(a.split(3).bits(0, DrawPurpose::Vertex) == b.split(3).bits(0, DrawPurpose::Vertex));
    CHECK(a.split(3).bits(0, DrawPurpose::Vertex) != a.split(4).bits(0, DrawPurpose::Vertex));
  }

  TEST_CASE("uniform and uniform_index ranges and moments") {
    const StreamRng r(2024);
    double sum = 0.0;
    std::set<std::uint64_t> seen;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double u = r.uniform(static_cast<std::uint64_t>(i), DrawPurpose::Outcome);
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      sum += u;
      const auto k = r.uniform_index(static_cast<std::uint64_t>(i), DrawPurpose::Vertex, 7);
      REQUIRE(k < 7);
      seen.insert(k);
    }
    // sd of the mean is 1/sqrt(12 n) ~ 6.5e-4
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.004));
    CHECK(seen.size() == 7);
    CHECK(r.uniform_index(0, DrawPurpose::Vertex, 1) == 0);
  }
}
