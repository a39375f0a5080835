#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "collapse/dynamics.hpp"

using namespace collapse;

namespace {

double unitarity_error(const Gate4& g) {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      Amplitude s = 0.0;
      for (int k = 0; k < 4; ++k) s += std::conj(g[k][i]) * g[k][j];
      worst = std::max(worst, std::abs(s - Amplitude(i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

ModelParams params(double theta, double x, std::uint64_t seed = 3) {
  ModelParams p;
  p.theta = theta;
  p.x = x;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("R-matrix is unitary and number preserving") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int i = 0; i < 100; ++i) {
      const Gate4 g = build_rmatrix(u(gen), u(gen), u(gen));
      CHECK(unitarity_error(g) <= 1e-12);
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          const int nr = (r & 1) + (r >> 1);
          const int nc = (c & 1) + (c >> 1);
          if (nr != nc) CHECK(g[r][c] == Amplitude(0.0));
        }
      }
    }
  }

  TEST_CASE("permutation angles") {
    const Gate4 half = build_rmatrix(std::numbers::pi / 2, 0.3, 0.1);
    CHECK(is_diagonal(half));
    const auto p0 = gate_permutation(half);
    REQUIRE(p0);
    CHECK(*p0 == std::array<int, 4>{0, 1, 2, 3});
    const auto p1 = gate_permutation(build_rmatrix(0.0, 0.0, 0.0));
    REQUIRE(p1);
    CHECK(*p1 == std::array<int, 4>{0, 2, 1, 3});
    CHECK_FALSE(gate_permutation(build_rmatrix(std::numbers::pi / 6, 0.0, 0.0)));
    CHECK(is_permutation_angle(std::numbers::pi / 2));
    CHECK_FALSE(is_permutation_angle(1.0));
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(params(0.1, 1.2).validate(), DynamicsError);
    CHECK_THROWS_AS(params(NAN, 0.5).validate(), DynamicsError);
    CHECK_THROWS_AS(CollapseModel(params(0.1, -0.1)), DynamicsError);
  }

  TEST_CASE("trajectories are reproducible and cover the lattice") {
    const auto g = LatticeGeometry::make(3, 6);
    const auto init = InitialState::eigen(FieldConfig::parse("100100"));
    const auto a = run_trajectory(g, params(0.7, 0.6, 17), init);
    const auto b = run_trajectory(g, params(0.7, 0.6, 17), init);
    const auto c = run_trajectory(g, params(0.7, 0.6, 18), init);
    REQUIRE(a.events.size() == 18);
    bool same = true;
    bool differ = false;
    for (std::size_t i = 0; i < a.events.size(); ++i) {
      same = same && a.events[i].vertex == b.events[i].vertex &&
             a.events[i].outcome == b.events[i].outcome &&
             a.events[i].stuff_post == b.events[i].stuff_post;
      differ = differ || !(a.events[i].vertex == c.events[i].vertex) ||
               !(a.events[i].outcome == c.events[i].outcome);
    }
    CHECK(same);
    CHECK(differ);
    CHECK(*a.final_state == *b.final_state);
    CHECK(a.final_state->norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("sweep policy follows the row sweep") {
    const auto g = LatticeGeometry::make(4, 3);
    RunOptions o;
    o.policy = MotionPolicy::Sweep;
    const auto rec = run_trajectory(g, params(0.4, 0.5), InitialState::vacuum(8), o);
    const auto l = sweep_labelling(g);
    REQUIRE(rec.events.size() == l.size());
    for (std::size_t i = 0; i < l.size(); ++i) CHECK(rec.events[i].vertex == l[i]);
  }

  TEST_CASE("cumulative log weight is the log of the trajectory probability") {
    const auto g = LatticeGeometry::make(3, 4);
    const auto rec = run_trajectory(g, params(0.9, 0.4), InitialState::eigen(FieldConfig::parse("110000")));
    double sum = 0.0;
    for (const auto& ev : rec.events) {
      CHECK(ev.probability > 0.0);
      CHECK(ev.probability <= 1.0);
      sum += std::log(ev.probability);
      CHECK(ev.cumulative_log_weight == doctest::Approx(sum).epsilon(1e-12));
    }
  }

  TEST_CASE("pure step equals the in-place step") {
    const auto g = LatticeGeometry::make(3, 2);
    const ModelParams p = params(0.5, 0.7, 5);
    const StreamRng rng(p.seed);
    const StateVector s0 = eigenstate(FieldConfig::parse("010010"));
    const Surface f0 = flat_surface(g);
    const StepOutput out = step(s0, f0, p, rng, 0);
    StateVector s = s0;
    Surface f = f0;
    const StepEvent ev = CollapseModel(p).step(s, f, rng, 0);
    CHECK(out.state == s);
    CHECK(out.surface == f);
    CHECK(out.event.vertex == ev.vertex);
    CHECK(out.event.outcome == ev.outcome);
  }

  TEST_CASE("replay reproduces the final state") {
    const auto g = LatticeGeometry::make(3, 5);
    const auto rec = run_trajectory(g, params(1.1, 0.8, 2), InitialState::eigen(FieldConfig::parse("100010")));
    std::size_t seen = 0;
    StateVector last(6);
    replay(rec, [&](const StepEvent& ev, const StateVector& s) {
      CHECK(ev.step == static_cast<long long>(seen));
      ++seen;
      last = s;
    });
    CHECK(seen == rec.events.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < last.dim(); ++i) worst = std::max(worst, std::abs(last[i] - (*rec.final_state)[i]));
    CHECK(worst <= 1e-13);
  }

  TEST_CASE("single link at theta = pi/2: weight ratio is X^(2(m0 - m1))") {
    const double x = 0.8;
    const auto g = LatticeGeometry::make(2, 12);
    const auto c1 = FieldConfig::parse("1000");
    const auto c0 = FieldConfig::parse("0000");
    const auto rec = run_trajectory(g, params(std::numbers::pi / 2, x, 4), InitialState::superposition(c1, c0));
    const auto w = track_branches(rec, c1, c0);
    REQUIRE(w.size() == rec.events.size());
    int m0 = 0;
    int m1 = 0;
    for (std::size_t i = 0; i < rec.events.size(); ++i) {
      const auto& ev = rec.events[i];
      if (ev.slots.a == 0) (ev.outcome.bit_a ? m1 : m0)++;
      if (ev.slots.b == 0) (ev.outcome.bit_b ? m1 : m0)++;
      const double ratio = w[i][0] / w[i][1];
      CHECK(std::log(ratio) == doctest::Approx(2.0 * (m0 - m1) * std::log(x)).epsilon(1e-10));
      CHECK(w[i][0] + w[i][1] == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(m0 + m1 == 12);
  }

  TEST_CASE("branch tracking refuses mixing gates") {
    const auto g = LatticeGeometry::make(2, 2);
    const auto c1 = FieldConfig::parse("1000");
    const auto c2 = FieldConfig::parse("0010");
    const auto rec = run_trajectory(g, params(0.5, 0.8), InitialState::superposition(c1, c2));
    CHECK_THROWS_AS(track_branches(rec, c1, c2), DynamicsError);
    RunOptions o;
    o.branches = BranchPair{c1, c2};
    CHECK_THROWS_AS(run_trajectory(g, params(0.5, 0.8), InitialState::superposition(c1, c2), o),
                    DynamicsError);
  }

  TEST_CASE("decay stop ends the run once the weight stays low") {
    const auto g = LatticeGeometry::make(2, 5000);
    const auto c1 = FieldConfig::parse("1000");
    const auto c0 = FieldConfig::parse("0000");
    RunOptions o;
    o.branches = BranchPair{c1, c0};
    o.decay_stop = DecayStop{0.005, 20};
    o.keep_final_state = false;
    const auto rec = run_trajectory(g, params(std::numbers::pi / 2, 0.5, 1), InitialState::superposition(c1, c0), o);
    CHECK(rec.stop_reason == StopReason::DecayConfirmed);
    const auto& w = *rec.events.back().branch_weights;
    CHECK(std::min(w[0], w[1]) <= 0.005);
    CHECK_FALSE(rec.final_state);
  }

  TEST_CASE("at X = 1 the state evolves unitarily") {
    const auto g = LatticeGeometry::make(3, 8);
    const auto rec = run_trajectory(g, params(0.6, 1.0, 8), InitialState::eigen(FieldConfig::parse("110000")));
    const auto ref = unitary_reference_stuff(rec);
    for (std::size_t i = 0; i < rec.events.size(); ++i) {
      CHECK(std::abs(rec.events[i].stuff_post[0] - ref[i][0]) <= 1e-10);
      CHECK(std::abs(rec.events[i].stuff_post[1] - ref[i][1]) <= 1e-10);
      CHECK(rec.events[i].probability == doctest::Approx(0.25));
    }
  }

  TEST_CASE("initial state descriptions") {
    CHECK(InitialState::vacuum(4).describe() == "eigenstate:0000");
    CHECK(InitialState::superposition(FieldConfig::parse("10"), FieldConfig::parse("01")).describe() ==
          "superposition:10,01");
  }
}
