#pragma once

// Exact small-lattice references for the sampler.
//
// Stem probabilities are computed two ways: the Schroedinger form
// ||J(o_n) U(v_n) ... J(o_1) U(v_1) psi_0||^2 on the state-vector kernels, and
// the Heisenberg form with dense conjugated operators
// W_k^dagger J(o_k) W_k, W_k = U(v_k) ... U(v_1). The density-matrix channel
// averages |psi><psi| over outcomes and is the deterministic counterpart of
// the trajectory ensemble.

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "collapse/dynamics.hpp"

namespace collapse {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using DensityMatrix = Eigen::MatrixXcd;

inline constexpr int kMaxStemVertices = 8;
inline constexpr int kMaxDensitySites = 4;

enum class CausalCheck { Enforce, Skip };

/// Schroedinger form. With CausalCheck::Enforce a labelling that is not a
/// natural labelling of a stem throws OracleError; Skip evaluates the given
/// order regardless (negative controls only).
double stem_probability(const StateVector& initial, std::span<const VertexId> labelling,
                        std::span<const KrausOutcome> outcomes, const ModelParams& params,
                        CausalCheck check = CausalCheck::Enforce);

/// Heisenberg form on dense matrices; n_slots <= 2 * kMaxDensitySites.
double stem_probability_heisenberg(const StateVector& initial,
                                   std::span<const VertexId> labelling,
                                   std::span<const KrausOutcome> outcomes,
                                   const ModelParams& params);

struct StemDistribution {
  std::vector<VertexId> vertices;   // sorted by (row, col); table key order
  std::vector<VertexId> labelling;  // evaluation order
  std::vector<double> table;        // key = sum_k outcome(vertices[k]).index() << 2k

  /// outcomes listed in `vertices` order.
  static std::uint64_t key(std::span<const KrausOutcome> outcomes);
  double total() const;
};

StemDistribution enumerate_stem(const StateVector& initial, std::span<const VertexId> labelling,
                                const ModelParams& params);

/// Dense embeddings on the full register.
Eigen::MatrixXcd embed_gate(const Gate4& gate, SlotPair slots, int n_slots);
Eigen::MatrixXcd embed_jump(KrausOutcome outcome, SlotPair slots, const JumpPair& jumps,
                            int n_slots);

DensityMatrix pure_density(const StateVector& state);

/// rho' = sum_o J(o) U(v) rho U(v)^dagger J(o)^dagger on v's slots.
DensityMatrix channel_evolve(const DensityMatrix& rho, VertexId v, const ModelParams& params);

struct DensityCheck {
  double hermiticity_error = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;

  bool valid() const {
    return hermiticity_error <= 1e-10 && trace_error <= 1e-10 && min_eigenvalue >= -1e-8;
  }
};

DensityCheck check_density(const DensityMatrix& rho);

// --- cross-checks ---------------------------------------------------------

struct CovarianceReport {
  std::size_t stems = 0;
  std::size_t labellings = 0;
  double max_labelling_difference = 0.0;  // across linear extensions
  double max_sum_error = 0.0;             // |sum of table - 1|
  double max_picture_difference = 0.0;    // Heisenberg vs Schroedinger
};

/// Every stem within `max_row` rows with at most `max_vertices` vertices,
/// every linear extension. With inject_misordered each labelling is also
/// evaluated reversed without causal checks, so the report must show a
/// labelling difference (negative control).
CovarianceReport check_covariance(const StateVector& initial, int n_sites, int max_row,
                                  int max_vertices, const ModelParams& params,
                                  bool inject_misordered = false);

struct SamplerReport {
  long long runs = 0;
  double total_variation = 0.0;
  double expected_total_variation = 0.0;  // multinomial estimate at this sample size
  double chi_square = 0.0;                // Pearson statistic over outcomes with p > 0
  int dof = 0;
  double p_value = 1.0;
};

/// Runs full trajectories on the whole (small) lattice with seeds
/// params.seed + i and compares the joint outcome histogram with
/// enumerate_stem over the row-sweep labelling.
SamplerReport compare_sampler(const LatticeGeometry& geometry, const ModelParams& params,
                              const InitialState& initial, long long runs,
                              MotionPolicy policy = MotionPolicy::Markov);

struct ChannelReport {
  long long runs = 0;
  double max_abs_error = 0.0;
  DensityCheck channel_density;
};

/// Ensemble average of the final |psi><psi| against the composed channel.
ChannelReport compare_channel(const LatticeGeometry& geometry, const ModelParams& params,
                              const InitialState& initial, long long runs);

}  // namespace collapse
