#pragma once

// Markovian collapse dynamics on the null lattice.
//
// One step: pick an eligible vertex uniformly, evolve the state with the
// R-matrix on the vertex's two slots, draw the outcome on the two outgoing
// links from ||J(o) U|psi>||^2, then hit and renormalise. Draws come from a
// counter-based stream keyed by the seed, in the fixed order (vertex,
// outcome) per step.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "collapse/hilbert.hpp"
#include "collapse/lattice.hpp"
#include "collapse/rng.hpp"

namespace collapse {

class DynamicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelParams {
  double theta = 0.0;
  double phase_alpha = 0.0;
  double phase_beta = 0.0;
  double x = 1.0;
  std::uint64_t seed = 0;

  double epsilon() const { return 1.0 - x; }

  /// Throws DynamicsError on X outside [0, 1] or non-finite angles.
  void validate() const;
};

/// Particle-number preserving R-matrix: 1 on the empty state, e^{i beta} on
/// the doubly occupied state and e^{i alpha} [[i sin, cos], [cos, i sin]] on
/// the single-particle block. Local order: j = bit_a | bit_b << 1, so j = 01
/// is a right-mover on the left ingoing slot.
Gate4 build_rmatrix(double theta, double phase_alpha, double phase_beta);
Gate4 build_rmatrix(const ModelParams& params);

bool is_diagonal(const Gate4& gate, double tol = 1e-14);

/// Maps each local class to the unique class it is sent to, if the gate is a
/// permutation up to phases (entries of modulus 1 within tol). Empty otherwise.
std::optional<std::array<int, 4>> gate_permutation(const Gate4& gate, double tol = 1e-12);

/// theta equals 0 or pi/2 within 1e-12.
bool is_permutation_angle(double theta);

enum class MotionPolicy { Markov, Sweep };

enum class StuffSurface { PreHit, PostHit };

std::string to_string(MotionPolicy policy);
std::string to_string(StuffSurface surface);

struct InitialState {
  enum class Kind { Eigenstate, Superposition };

  Kind kind = Kind::Eigenstate;
  FieldConfig first;
  FieldConfig second;  // Superposition only

  static InitialState vacuum(int n_slots);
  static InitialState eigen(FieldConfig config);
  static InitialState superposition(FieldConfig c1, FieldConfig c2);

  int n_slots() const { return first.n_slots(); }
  StateVector build() const;
  std::string describe() const;
};

struct BranchPair {
  FieldConfig first;
  FieldConfig second;
};

/// Stop once the smaller branch weight has stayed <= threshold for `window`
/// further steps. window < 0 selects 5 N^2.
struct DecayStop {
  double threshold = 0.005;
  long long window = -1;
};

struct RunOptions {
  MotionPolicy policy = MotionPolicy::Markov;
  std::optional<BranchPair> branches;
  std::optional<DecayStop> decay_stop;  // requires branches
  bool keep_final_state = true;
  std::uint32_t stream = 0;
  long long max_steps = -1;
};

struct StepEvent {
  long long step = 0;
  VertexId vertex;
  SlotPair slots;
  KrausOutcome outcome;
  std::array<double, 2> stuff_pre{};   // pre-hit state, slots (a, b)
  std::array<double, 2> stuff_post{};  // post-hit state, slots (a, b)
  double probability = 0.0;
  double cumulative_log_weight = 0.0;
  std::optional<std::array<double, 2>> branch_weights;
};

enum class StopReason { Complete, DecayConfirmed, StepLimit };

struct TrajectoryRecord {
  ModelParams params;
  LatticeGeometry geometry;
  InitialState initial;
  MotionPolicy policy = MotionPolicy::Markov;
  std::uint32_t stream = 0;
  std::optional<BranchPair> branches;
  std::vector<StepEvent> events;
  std::optional<StateVector> final_state;
  StopReason stop_reason = StopReason::Complete;
};

/// Precomputed gate, jump pair and branch permutation for one parameter set.
class CollapseModel {
 public:
  explicit CollapseModel(const ModelParams& params);

  const ModelParams& params() const { return params_; }
  const Gate4& gate() const { return gate_; }
  const JumpPair& jumps() const { return jumps_; }
  bool diagonal_gate() const { return diagonal_; }
  const std::optional<std::array<int, 4>>& permutation() const { return permutation_; }

  /// One sampler step in place. Throws DynamicsError if no vertex is eligible.
  StepEvent step(StateVector& state, Surface& surface, const StreamRng& rng, long long step_index,
                 MotionPolicy policy = MotionPolicy::Markov) const;

  /// Evolves across v with a prescribed outcome (no randomness); returns the
  /// event with its probability. Used by replay and the oracle cross-checks.
  StepEvent forced_step(StateVector& state, Surface& surface, VertexId v, KrausOutcome outcome,
                        long long step_index) const;

  /// Tracks a basis configuration through the gate at slots (a, b).
  FieldConfig transport(const FieldConfig& config, SlotPair slots) const;

 private:
  StepEvent evolve(StateVector& state, Surface& surface, VertexId v, long long step_index,
                   const std::function<int(const std::array<double, 4>&)>& choose) const;

  ModelParams params_;
  Gate4 gate_;
  JumpPair jumps_;
  bool diagonal_;
  std::optional<std::array<int, 4>> permutation_;
};

struct StepOutput {
  StateVector state;
  Surface surface;
  StepEvent event;
};

/// Pure form of one sampler step.
StepOutput step(const StateVector& state, const Surface& surface, const ModelParams& params,
                const StreamRng& rng, long long step_index = 0);

TrajectoryRecord run_trajectory(const LatticeGeometry& geometry, const ModelParams& params,
                                const InitialState& initial, const RunOptions& options = {});

/// Re-executes a record's vertex sequence and outcomes from its initial state,
/// calling visit after every hit with the post-hit state.
void replay(const TrajectoryRecord& record,
            const std::function<void(const StepEvent&, const StateVector&)>& visit);

/// Branch weights |<c_i(n)|psi_n>|^2 after every step, the configurations
/// transported through each gate. Requires theta in {0, pi/2}.
std::vector<std::array<double, 2>> track_branches(const TrajectoryRecord& record,
                                                  const FieldConfig& c1, const FieldConfig& c2);

/// Stuff on each step's outgoing slots under pure unitary evolution along the
/// record's vertex sequence.
std::vector<std::array<double, 2>> unitary_reference_stuff(const TrajectoryRecord& record);

}  // namespace collapse
