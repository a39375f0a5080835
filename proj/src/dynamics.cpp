#include "collapse/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace collapse {

void ModelParams::validate() const {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DynamicsError("X must lie in [0, 1], got " + std::to_string(x));
  }
  if (!std::isfinite(theta) || !std::isfinite(phase_alpha) || !std::isfinite(phase_beta)) {
    throw DynamicsError("theta and phases must be finite");
  }
}

Gate4 build_rmatrix(double theta, double phase_alpha, double phase_beta) {
  if (!std::isfinite(theta) || !std::isfinite(phase_alpha) || !std::isfinite(phase_beta)) {
    throw DynamicsError("R-matrix parameters must be finite");
  }
  const Amplitude i(0.0, 1.0);
  const Amplitude ea = std::polar(1.0, phase_alpha);
  const Amplitude eb = std::polar(1.0, phase_beta);
  const double s = std::sin(theta), c = std::cos(theta);
  Gate4 g{};
  g[0][0] = 1.0;
  g[1][1] = i * ea * s;
  g[1][2] = ea * c;
  g[2][1] = ea * c;
  g[2][2] = i * ea * s;
  g[3][3] = eb;
  return g;
}

Gate4 build_rmatrix(const ModelParams& params) {
  return build_rmatrix(params.theta, params.phase_alpha, params.phase_beta);
}

bool is_diagonal(const Gate4& gate, double tol) {
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (r != c && std::abs(gate[r][c]) > tol) return false;
    }
  }
  return true;
}

std::optional<std::array<int, 4>> gate_permutation(const Gate4& gate, double tol) {
  std::array<int, 4> perm{};
  std::array<bool, 4> hit{};
  for (int c = 0; c < 4; ++c) {
    int target = -1;
    for (int r = 0; r < 4; ++r) {
      const double mag = std::abs(gate[r][c]);
      if (std::abs(mag - 1.0) <= tol) {
        if (target >= 0) return std::nullopt;
        target = r;
      } else if (mag > tol) {
        return std::nullopt;
      }
    }
    if (target < 0 || hit[target]) return std::nullopt;
    hit[target] = true;
    perm[c] = target;
  }
  return perm;
}

bool is_permutation_angle(double theta) {
  return std::abs(theta) <= 1e-12 || std::abs(theta - std::numbers::pi / 2) <= 1e-12;
}

std::string to_string(MotionPolicy policy) {
  return policy == MotionPolicy::Markov ? "markov" : "sweep";
}

std::string to_string(StuffSurface surface) {
  return surface == StuffSurface::PreHit ? "pre-hit" : "post-hit";
}

InitialState InitialState::vacuum(int n_slots) { return eigen(FieldConfig::zeros(n_slots)); }

InitialState InitialState::eigen(FieldConfig config) {
  InitialState s;
  s.kind = Kind::Eigenstate;
  s.first = std::move(config);
  return s;
}

InitialState InitialState::superposition(FieldConfig c1, FieldConfig c2) {
  if (c1 == c2) throw DynamicsError("superposition needs two distinct configurations");
  if (c1.n_slots() != c2.n_slots()) {
    throw DynamicsError("superposed configurations differ in length");
  }
  InitialState s;
  s.kind = Kind::Superposition;
  s.first = std::move(c1);
  s.second = std::move(c2);
  return s;
}

StateVector InitialState::build() const {
  return kind == Kind::Eigenstate ? eigenstate(first) : superpose(first, second);
}

std::string InitialState::describe() const {
  if (kind == Kind::Eigenstate) return "eigenstate:" + first.to_string();
  return "superposition:" + first.to_string() + "," + second.to_string();
}

CollapseModel::CollapseModel(const ModelParams& params)
    : params_((params.validate(), params)),
      gate_(build_rmatrix(params)),
      jumps_(build_jump_pair(params.x)),
      diagonal_(is_diagonal(gate_)),
      permutation_(gate_permutation(gate_)) {}

StepEvent CollapseModel::evolve(
    StateVector& state, Surface& surface, VertexId v, long long step_index,
    const std::function<int(const std::array<double, 4>&)>& choose) const {
  const SlotPair slots = ingoing_slots(v, surface);
  const auto& k = kernels::active();

  // A diagonal gate leaves the class norms unchanged; its phases are folded
  // into the hit below instead of costing a separate pass.
  ClassNorms norms{};
  if (diagonal_) {
    k.pair_class_norms(state.amplitudes(), slots.a, slots.b, norms);
  } else {
    k.gate_pair(state.amplitudes(), slots.a, slots.b, gate_, &norms);
  }

  const auto weights = kraus_outcome_weights(norms, jumps_);
  const double total = weights[0] + weights[1] + weights[2] + weights[3];
  const int chosen = choose(weights);
  const double weight = weights[chosen];
  if (!(weight >= kZeroProbability)) {
    throw DynamicsError("attempt to realise a zero-probability outcome at vertex " +
                        to_string(v));
  }
  const KrausOutcome outcome = KrausOutcome::from_index(chosen);
  const auto f = kraus_class_factors(outcome, jumps_, weight);
  ClassFactors factors;
  for (int j = 0; j < 4; ++j) factors[j] = diagonal_ ? gate_[j][j] * f[j] : Amplitude(f[j]);
  k.scale_pair_classes(state.amplitudes(), slots.a, slots.b, factors);

  ClassNorms post{};
  double post_total = 0.0;
  for (int j = 0; j < 4; ++j) {
    post[j] = norms[j] * f[j] * f[j];
    post_total += post[j];
  }

  StepEvent ev;
  ev.step = step_index;
  ev.vertex = v;
  ev.slots = slots;
  ev.outcome = outcome;
  ev.stuff_pre = {(norms[1] + norms[3]) / total, (norms[2] + norms[3]) / total};
  ev.stuff_post = {(post[1] + post[3]) / post_total, (post[2] + post[3]) / post_total};
  ev.probability = weight / total;
  apply_motion_in_place(surface, v);
  return ev;
}

StepEvent CollapseModel::step(StateVector& state, Surface& surface, const StreamRng& rng,
                              long long step_index, MotionPolicy policy) const {
  const auto eligible = eligible_vertices(surface);
  if (eligible.empty()) throw DynamicsError("no eligible vertex: the lattice is exhausted");
  VertexId v;
  if (policy == MotionPolicy::Markov) {
    v = eligible[rng.uniform_index(static_cast<std::uint64_t>(step_index), DrawPurpose::Vertex,
                                   eligible.size())];
  } else {
    v = *std::min_element(eligible.begin(), eligible.end());
  }
  const double u = rng.uniform(static_cast<std::uint64_t>(step_index), DrawPurpose::Outcome);
  return evolve(state, surface, v, step_index, [u](const std::array<double, 4>& w) {
    const double total = w[0] + w[1] + w[2] + w[3];
    const double target = u * total;
    double cumulative = 0.0;
    int last_positive = 0;
    for (int o = 0; o < 4; ++o) {
      if (!(w[o] > 0.0)) continue;
      last_positive = o;
      cumulative += w[o];
      if (target < cumulative) return o;
    }
    return last_positive;
  });
}

StepEvent CollapseModel::forced_step(StateVector& state, Surface& surface, VertexId v,
                                     KrausOutcome outcome, long long step_index) const {
  const int forced = outcome.index();
  return evolve(state, surface, v, step_index,
                [forced](const std::array<double, 4>&) { return forced; });
}

FieldConfig CollapseModel::transport(const FieldConfig& config, SlotPair slots) const {
  if (!permutation_) {
    throw DynamicsError("branch transport needs a gate that permutes basis states");
  }
  const std::uint64_t idx = config.index();
  const std::uint64_t bit_a = std::uint64_t{1} << slots.a;
  const std::uint64_t bit_b = std::uint64_t{1} << slots.b;
  const int j = ((idx & bit_a) ? 1 : 0) | ((idx & bit_b) ? 2 : 0);
  const int target = (*permutation_)[j];
  std::uint64_t out = idx & ~(bit_a | bit_b);
  if (target & 1) out |= bit_a;
  if (target & 2) out |= bit_b;
  return FieldConfig::from_index(out, config.n_slots());
}

StepOutput step(const StateVector& state, const Surface& surface, const ModelParams& params,
                const StreamRng& rng, long long step_index) {
  const CollapseModel model(params);
  StepOutput out{state, surface, {}};
  out.event = model.step(out.state, out.surface, rng, step_index);
  return out;
}

namespace {

void check_branches(const CollapseModel& model, const BranchPair& branches, int n_slots) {
  if (!is_permutation_angle(model.params().theta) || !model.permutation()) {
    throw DynamicsError("branch tracking requires theta = 0 or pi/2 (got theta = " +
                        std::to_string(model.params().theta) + ")");
  }
  if (branches.first.n_slots() != n_slots || branches.second.n_slots() != n_slots) {
    throw DynamicsError("branch configurations must have " + std::to_string(n_slots) + " slots");
  }
}

}  // namespace

TrajectoryRecord run_trajectory(const LatticeGeometry& geometry, const ModelParams& params,
                                const InitialState& initial, const RunOptions& options) {
  params.validate();
  if (initial.n_slots() != geometry.n_slots()) {
    throw DynamicsError("initial state has " + std::to_string(initial.n_slots()) +
                        " slots, lattice needs " + std::to_string(geometry.n_slots()));
  }
  if (options.decay_stop && !options.branches) {
    throw DynamicsError("a decay stop condition needs branch configurations to track");
  }
  const CollapseModel model(params);
  if (options.branches) check_branches(model, *options.branches, geometry.n_slots());

  const StreamRng rng(params.seed, options.stream);
  TrajectoryRecord record;
  record.params = params;
  record.geometry = geometry;
  record.initial = initial;
  record.policy = options.policy;
  record.stream = options.stream;
  record.branches = options.branches;

  StateVector state = initial.build();
  Surface surface = flat_surface(geometry);
  std::optional<BranchPair> tracked = options.branches;

  long long window = 0;
  if (options.decay_stop) {
    window = options.decay_stop->window >= 0
                 ? options.decay_stop->window
                 : 5LL * geometry.n_sites * geometry.n_sites;
  }
  long long below_since = -1;
  double log_weight = 0.0;
  record.stop_reason = StopReason::Complete;

  for (long long n = 0; !surface.complete(); ++n) {
    if (options.max_steps >= 0 && n >= options.max_steps) {
      record.stop_reason = StopReason::StepLimit;
      break;
    }
    StepEvent ev = model.step(state, surface, rng, n, options.policy);
    log_weight += std::log(ev.probability);
    ev.cumulative_log_weight = log_weight;
    if (tracked) {
      tracked->first = model.transport(tracked->first, ev.slots);
      tracked->second = model.transport(tracked->second, ev.slots);
      ev.branch_weights = std::array<double, 2>{branch_weight(state, tracked->first),
                                                branch_weight(state, tracked->second)};
    }
    record.events.push_back(std::move(ev));
    if (options.decay_stop) {
      const auto& w = *record.events.back().branch_weights;
      if (std::min(w[0], w[1]) <= options.decay_stop->threshold) {
        if (below_since < 0) below_since = n;
        if (n - below_since >= window) {
          record.stop_reason = StopReason::DecayConfirmed;
          break;
        }
      } else {
        below_since = -1;
      }
    }
  }
  if (options.keep_final_state) record.final_state = std::move(state);
  return record;
}

void replay(const TrajectoryRecord& record,
            const std::function<void(const StepEvent&, const StateVector&)>& visit) {
  const CollapseModel model(record.params);
  StateVector state = record.initial.build();
  Surface surface = flat_surface(record.geometry);
  for (const StepEvent& ev : record.events) {
    const StepEvent again = model.forced_step(state, surface, ev.vertex, ev.outcome, ev.step);
    visit(again, state);
  }
}

std::vector<std::array<double, 2>> track_branches(const TrajectoryRecord& record,
                                                  const FieldConfig& c1, const FieldConfig& c2) {
  const CollapseModel model(record.params);
  check_branches(model, BranchPair{c1, c2}, record.geometry.n_slots());
  FieldConfig b1 = c1, b2 = c2;
  std::vector<std::array<double, 2>> series;
  series.reserve(record.events.size());
  replay(record, [&](const StepEvent& ev, const StateVector& state) {
    b1 = model.transport(b1, ev.slots);
    b2 = model.transport(b2, ev.slots);
    series.push_back({branch_weight(state, b1), branch_weight(state, b2)});
  });
  return series;
}

std::vector<std::array<double, 2>> unitary_reference_stuff(const TrajectoryRecord& record) {
  const Gate4 gate = build_rmatrix(record.params);
  const auto& k = kernels::active();
  StateVector state = record.initial.build();
  std::vector<std::array<double, 2>> out;
  out.reserve(record.events.size());
  for (const StepEvent& ev : record.events) {
    ClassNorms q{};
    k.gate_pair(state.amplitudes(), ev.slots.a, ev.slots.b, gate, &q);
    const double total = q[0] + q[1] + q[2] + q[3];
    out.push_back({(q[1] + q[3]) / total, (q[2] + q[3]) / total});
  }
  return out;
}

}  // namespace collapse
