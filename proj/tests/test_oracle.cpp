#include <doctest.h>

#include <cmath>
#include <numbers>

#include "collapse/oracle.hpp"

using namespace collapse;

namespace {

ModelParams params(double theta, double x, std::uint64_t seed = 1) {
  ModelParams p;
  p.theta = theta;
  p.x = x;
  p.phase_alpha = 0.4;
  p.phase_beta = -0.9;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("one vertex on the vacuum: product of link probabilities") {
    const double x = 0.6;
    const StateVector vac = eigenstate(FieldConfig::zeros(4));
    const std::vector<VertexId> l{{1, 0}};
    const double p0 = 1.0 / (1.0 + x * x);
    const double p1 = x * x / (1.0 + x * x);
    CHECK(stem_probability(vac, l, std::vector{KrausOutcome{0, 0}}, params(0.3, x)) ==
          doctest::Approx(p0 * p0));
    CHECK(stem_probability(vac, l, std::vector{KrausOutcome{1, 0}}, params(0.3, x)) ==
          doctest::Approx(p1 * p0));
    CHECK(stem_probability(vac, l, std::vector{KrausOutcome{1, 1}}, params(0.3, x)) ==
          doctest::Approx(p1 * p1));
  }

  TEST_CASE("one particle through one vertex") {
    // slot 1 is the left ingoing link of (1, 0); it stays with amplitude i sin(theta).
    const double x = 0.5;
    const double th = 0.7;
    const StateVector s = eigenstate(FieldConfig::parse("0100"));
    const std::vector<VertexId> l{{1, 0}};
    const double n = 1.0 + x * x;
    const double stay = std::sin(th) * std::sin(th);
    const double move = 1.0 - stay;
    // outcome (1, 0): particle seen on slot a
    const double expect = (stay + move * x * x * x * x) / (n * n);
    CHECK(stem_probability(s, l, std::vector{KrausOutcome{1, 0}}, params(th, x)) ==
          doctest::Approx(expect).epsilon(1e-12));
  }

  TEST_CASE("Heisenberg and Schroedinger forms agree") {
    const StateVector s = superpose(FieldConfig::parse("100000"), FieldConfig::parse("000110"));
    const std::vector<VertexId> l{{1, 0}, {1, 2}, {1, 1}, {2, 1}};
    for (int key = 0; key < 256; key += 7) {
      std::vector<KrausOutcome> o;
      for (int k = 0; k < 4; ++k) o.push_back(KrausOutcome::from_index((key >> (2 * k)) & 3));
      const double a = stem_probability(s, l, o, params(0.9, 0.35));
      const double b = stem_probability_heisenberg(s, l, o, params(0.9, 0.35));
      CHECK(std::abs(a - b) <= 1e-12);
    }
  }

  TEST_CASE("causal order is enforced unless skipped") {
    const StateVector s = eigenstate(FieldConfig::parse("1000"));
    const std::vector<VertexId> bad{{2, 0}, {1, 0}, {1, 1}};
    const std::vector<KrausOutcome> o(3);
    CHECK_THROWS_AS(stem_probability(s, bad, o, params(0.5, 0.5)), OracleError);
    CHECK_NOTHROW(stem_probability(s, bad, o, params(0.5, 0.5), CausalCheck::Skip));
    CHECK_THROWS_AS(enumerate_stem(s, bad, params(0.5, 0.5)), OracleError);
  }

  TEST_CASE("stem tables sum to one and are keyed in vertex order") {
    const StateVector s = superpose(FieldConfig::parse("1000"), FieldConfig::parse("0010"));
    const std::vector<VertexId> l{{1, 1}, {1, 0}, {2, 0}};
    const auto d = enumerate_stem(s, l, params(0.5, 0.4));
    CHECK(d.total() == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(d.vertices == std::vector<VertexId>{{1, 0}, {1, 1}, {2, 0}});
    const std::vector<KrausOutcome> by_vertex{{1, 0}, {0, 0}, {0, 1}};
    const std::vector<KrausOutcome> by_label{{0, 0}, {1, 0}, {0, 1}};
    CHECK(d.table[StemDistribution::key(by_vertex)] ==
          doctest::Approx(stem_probability(s, l, by_label, params(0.5, 0.4))).epsilon(1e-12));
  }

  TEST_CASE("covariance holds and the negative control breaks it") {
    const StateVector s = superpose(FieldConfig::parse("100000"), FieldConfig::parse("001000"));
    const auto good = check_covariance(s, 3, 2, 4, params(0.6, 0.5));
    CHECK(good.stems > 5);
    CHECK(good.max_labelling_difference <= 1e-12);
    CHECK(good.max_sum_error <= 1e-10);
    CHECK(good.max_picture_difference <= 1e-12);
    const auto bad = check_covariance(s, 3, 2, 4, params(0.6, 0.5), true);
    CHECK(bad.max_labelling_difference > 1e-6);
  }

  TEST_CASE("channel keeps density matrices valid") {
    const StateVector s = superpose(FieldConfig::parse("1000"), FieldConfig::parse("0010"));
    DensityMatrix rho = pure_density(s);
    for (const VertexId v : sweep_labelling(LatticeGeometry::make(2, 3))) {
      rho = channel_evolve(rho, v, params(0.8, 0.3));
      const DensityCheck c = check_density(rho);
      CHECK(c.valid());
      CHECK(c.trace_error <= 1e-12);
    }
    CHECK_THROWS_AS(channel_evolve(DensityMatrix::Identity(3, 3), {1, 0}, params(0.8, 0.3)),
                    OracleError);
  }

  TEST_CASE("X = 1 outcome distribution is uniform") {
    const auto g = LatticeGeometry::make(2, 2);
    const auto d = enumerate_stem(superpose(FieldConfig::parse("1000"), FieldConfig::parse("0010")),
                                  sweep_labelling(g), params(0.9, 1.0));
    for (double p : d.table) CHECK(p == doctest::Approx(1.0 / 256.0).epsilon(1e-12));
  }

  TEST_CASE("sampler and channel comparisons at small sizes") {
    const auto g = LatticeGeometry::make(2, 2);
    const auto init = InitialState::superposition(FieldConfig::parse("1000"), FieldConfig::parse("0010"));
    const SamplerReport r = compare_sampler(g, params(0.5, 0.3, 100), init, 4000);
    CHECK(r.runs == 4000);
    CHECK(r.total_variation < 2.0 * r.expected_total_variation);
    const ChannelReport c = compare_channel(g, params(0.5, 0.3, 100), init, 2000);
    CHECK(c.max_abs_error < 0.05);
    CHECK(c.channel_density.valid());
    CHECK_THROWS_AS(compare_sampler(LatticeGeometry::make(3, 3), params(0.5, 0.3), InitialState::vacuum(6), 10),
                    OracleError);
  }
}
