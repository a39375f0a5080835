#include <doctest.h>

#include <cmath>
#include <random>

#include "collapse/hilbert.hpp"

using namespace collapse;

TEST_SUITE("hilbert") {
  TEST_CASE("field configurations round-trip through indices and text") {
    const FieldConfig c = FieldConfig::parse("0110");
    CHECK(c.n_slots() == 4);
    CHECK(c[1] == 1);
    CHECK(c[3] == 0);
    CHECK(c.index() == 6);
    CHECK(c.occupation() == 2);
    CHECK(FieldConfig::from_index(6, 4) == c);
    CHECK(c.to_string() == "0110");
    CHECK_THROWS_AS(FieldConfig::parse("01a0"), HilbertError);
  }

  TEST_CASE("eigenstates and superpositions") {
    const auto c1 = FieldConfig::parse("1000");
    const auto c2 = FieldConfig::parse("0010");
    const StateVector e = eigenstate(c1);
    CHECK(e.norm_squared() == doctest::Approx(1.0));
    CHECK(e[1] == Amplitude(1.0, 0.0));
    const StateVector s = superpose(c1, c2);
    CHECK(branch_weight(s, c1) == doctest::Approx(0.5));
    CHECK(branch_weight(s, c2) == doctest::Approx(0.5));
    CHECK(stuff(s, 0) == doctest::Approx(0.5));
    CHECK(stuff(s, 1) == doctest::Approx(0.0));
    CHECK_THROWS_AS(superpose(c1, c1), HilbertError);
    CHECK_THROWS_AS(superpose(c1, FieldConfig::parse("10")), HilbertError);
  }

  TEST_CASE("jump pair is complete for random X") {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const double x = u(gen);
      const JumpPair j = build_jump_pair(x);
      for (int bit = 0; bit < 2; ++bit) {
        CHECK(std::abs(j.j0[bit] * j.j0[bit] + j.j1[bit] * j.j1[bit] - 1.0) <= 1e-14);
      }
      CHECK(j.j0[1] / j.j0[0] == doctest::Approx(x));
    }
    CHECK_THROWS_AS(build_jump_pair(-0.1), HilbertError);
    CHECK_THROWS_AS(build_jump_pair(1.5), HilbertError);
  }

  TEST_CASE("outcome weights sum to the norm") {
    const JumpPair j = build_jump_pair(0.3);
    const ClassNorms q{0.1, 0.2, 0.3, 0.4};
    const auto w = kraus_outcome_weights(q, j);
    CHECK(w[0] + w[1] + w[2] + w[3] == doctest::Approx(1.0));
    // outcome 00 on the empty class: (1/(1+X^2))^2
    const auto w0 = kraus_outcome_weights({1.0, 0.0, 0.0, 0.0}, j);
    CHECK(w0[0] == doctest::Approx(1.0 / (1.09 * 1.09)));
  }

  TEST_CASE("X = 1 hits leave the state alone") {
    const StateVector s = superpose(FieldConfig::parse("1100"), FieldConfig::parse("0011"));
    for (int o = 0; o < 4; ++o) {
      const KrausResult r = apply_two_slot_kraus(s, 0, 3, KrausOutcome::from_index(o), 1.0);
      CHECK(r.weight == doctest::Approx(0.25));
      for (std::size_t i = 0; i < s.dim(); ++i) CHECK(std::abs(r.state[i] - s[i]) <= 1e-15);
    }
  }

  TEST_CASE("X = 0 hits project") {
    const StateVector s = superpose(FieldConfig::parse("1000"), FieldConfig::parse("0100"));
    const KrausResult r = apply_two_slot_kraus(s, 0, 1, KrausOutcome{1, 0}, 0.0);
    CHECK(r.weight == doctest::Approx(0.5));
    CHECK(branch_weight(r.state, FieldConfig::parse("1000")) == doctest::Approx(1.0));
    CHECK_THROWS_AS(apply_two_slot_kraus(s, 0, 1, KrausOutcome{1, 1}, 0.0), HilbertError);
  }

  TEST_CASE("slot pairs are validated") {
    StateVector s = eigenstate(FieldConfig::parse("0000"));
    Gate4 id{};
    for (int i = 0; i < 4; ++i) id[i][i] = 1.0;
    CHECK_THROWS_AS(apply_two_slot_gate(s, 1, 1, id), HilbertError);
    CHECK_THROWS_AS(apply_two_slot_gate(s, 0, 4, id), HilbertError);
    CHECK(apply_two_slot_gate(s, 0, 3, id) == s);
    CHECK_THROWS_AS(StateVector(kMaxSlots + 1), HilbertError);
  }
}
