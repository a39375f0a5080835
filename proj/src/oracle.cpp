#include "collapse/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "collapse/parallel.hpp"

namespace collapse {

namespace {

int sites_of(const StateVector& state) {
  if (state.n_slots() % 2 != 0) throw OracleError("state must cover an even number of slots");
  return state.n_slots() / 2;
}

ClassFactors jump_factors(KrausOutcome o, const JumpPair& jumps) {
  ClassFactors f;
  for (int j = 0; j < 4; ++j) {
    f[j] = Amplitude(jumps.element(o.bit_a, j & 1) * jumps.element(o.bit_b, j >> 1), 0.0);
  }
  return f;
}

void require_natural(std::span<const VertexId> labelling, int n_sites) {
  if (!is_natural_labelling(labelling, n_sites)) {
    throw OracleError("labelling is not a natural labelling of a stem (causal order violated)");
  }
}

std::map<VertexId, int> positions(const std::vector<VertexId>& vertices) {
  std::map<VertexId, int> pos;
  for (std::size_t k = 0; k < vertices.size(); ++k) pos[vertices[k]] = static_cast<int>(k);
  return pos;
}

// Outcomes of an assignment key, reordered to follow `labelling`.
std::vector<KrausOutcome> outcomes_for(std::uint64_t key, std::span<const VertexId> labelling,
                                       const std::map<VertexId, int>& pos) {
  std::vector<KrausOutcome> out;
  out.reserve(labelling.size());
  for (const VertexId& v : labelling) {
    out.push_back(KrausOutcome::from_index(static_cast<int>((key >> (2 * pos.at(v))) & 3u)));
  }
  return out;
}

}  // namespace

double stem_probability(const StateVector& initial, std::span<const VertexId> labelling,
                        std::span<const KrausOutcome> outcomes, const ModelParams& params,
                        CausalCheck check) {
  if (labelling.size() != outcomes.size()) {
    throw OracleError("labelling and outcomes differ in length");
  }
  const int n_sites = sites_of(initial);
  if (check == CausalCheck::Enforce) require_natural(labelling, n_sites);
  params.validate();
  const Gate4 gate = build_rmatrix(params);
  const JumpPair jumps = build_jump_pair(params.x);
  const auto& k = kernels::active();
  StateVector psi = initial;
  for (std::size_t i = 0; i < labelling.size(); ++i) {
    const SlotPair s = vertex_slots(labelling[i], n_sites);
    k.gate_pair(psi.amplitudes(), s.a, s.b, gate, nullptr);
    k.scale_pair_classes(psi.amplitudes(), s.a, s.b, jump_factors(outcomes[i], jumps));
  }
  return psi.norm_squared();
}

Eigen::MatrixXcd embed_gate(const Gate4& gate, SlotPair slots, int n_slots) {
  const Eigen::Index dim = Eigen::Index{1} << n_slots;
  const std::uint64_t bit_a = std::uint64_t{1} << slots.a;
  const std::uint64_t bit_b = std::uint64_t{1} << slots.b;
  const std::array<std::uint64_t, 4> offset{0, bit_a, bit_b, bit_a | bit_b};
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::uint64_t col = 0; col < static_cast<std::uint64_t>(dim); ++col) {
    const int j = ((col & bit_a) ? 1 : 0) | ((col & bit_b) ? 2 : 0);
    const std::uint64_t base = col & ~(bit_a | bit_b);
    for (int r = 0; r < 4; ++r) {
      m(static_cast<Eigen::Index>(base | offset[r]), static_cast<Eigen::Index>(col)) = gate[r][j];
    }
  }
  return m;
}

Eigen::MatrixXcd embed_jump(KrausOutcome outcome, SlotPair slots, const JumpPair& jumps,
                            int n_slots) {
  const Eigen::Index dim = Eigen::Index{1} << n_slots;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const int bit_a = static_cast<int>((i >> slots.a) & 1);
    const int bit_b = static_cast<int>((i >> slots.b) & 1);
    m(i, i) = jumps.element(outcome.bit_a, bit_a) * jumps.element(outcome.bit_b, bit_b);
  }
  return m;
}

double stem_probability_heisenberg(const StateVector& initial,
                                   std::span<const VertexId> labelling,
                                   std::span<const KrausOutcome> outcomes,
                                   const ModelParams& params) {
  if (labelling.size() != outcomes.size()) {
    throw OracleError("labelling and outcomes differ in length");
  }
  const int n_sites = sites_of(initial);
  if (n_sites > kMaxDensitySites) throw OracleError("Heisenberg form limited to N <= 4");
  require_natural(labelling, n_sites);
  params.validate();
  const int n_slots = initial.n_slots();
  const Gate4 gate = build_rmatrix(params);
  const JumpPair jumps = build_jump_pair(params.x);
  const Eigen::Index dim = Eigen::Index{1} << n_slots;

  Eigen::VectorXcd psi(dim);
  for (Eigen::Index i = 0; i < dim; ++i) psi(i) = initial[static_cast<std::size_t>(i)];
  Eigen::MatrixXcd evolution = Eigen::MatrixXcd::Identity(dim, dim);
  for (std::size_t k = 0; k < labelling.size(); ++k) {
    const SlotPair s = vertex_slots(labelling[k], n_sites);
    evolution = embed_gate(gate, s, n_slots) * evolution;
    const Eigen::MatrixXcd heisenberg =
        evolution.adjoint() * embed_jump(outcomes[k], s, jumps, n_slots) * evolution;
    psi = heisenberg * psi;
  }
  return psi.squaredNorm();
}

std::uint64_t StemDistribution::key(std::span<const KrausOutcome> outcomes) {
  std::uint64_t key = 0;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    key |= static_cast<std::uint64_t>(outcomes[k].index()) << (2 * k);
  }
  return key;
}

double StemDistribution::total() const {
  double sum = 0.0;
  for (double p : table) sum += p;
  return sum;
}

StemDistribution enumerate_stem(const StateVector& initial, std::span<const VertexId> labelling,
                                const ModelParams& params) {
  if (labelling.size() > static_cast<std::size_t>(kMaxStemVertices)) {
    throw OracleError("stem enumeration limited to " + std::to_string(kMaxStemVertices) +
                      " vertices, got " + std::to_string(labelling.size()));
  }
  const int n_sites = sites_of(initial);
  require_natural(labelling, n_sites);
  params.validate();

  StemDistribution dist;
  dist.labelling.assign(labelling.begin(), labelling.end());
  dist.vertices = dist.labelling;
  std::sort(dist.vertices.begin(), dist.vertices.end());
  const auto pos = positions(dist.vertices);
  dist.table.assign(std::size_t{1} << (2 * labelling.size()), 0.0);

  const Gate4 gate = build_rmatrix(params);
  const JumpPair jumps = build_jump_pair(params.x);
  const auto& k = kernels::active();

  // Depth-first over outcome prefixes: each node applies U once and branches.
  auto recurse = [&](auto&& self, std::size_t depth, StateVector psi, std::uint64_t key) -> void {
    if (depth == labelling.size()) {
      dist.table[key] = psi.norm_squared();
      return;
    }
    const SlotPair s = vertex_slots(labelling[depth], n_sites);
    k.gate_pair(psi.amplitudes(), s.a, s.b, gate, nullptr);
    const int shift = 2 * pos.at(labelling[depth]);
    for (int o = 0; o < 4; ++o) {
      StateVector hit = psi;
      k.scale_pair_classes(hit.amplitudes(), s.a, s.b,
                           jump_factors(KrausOutcome::from_index(o), jumps));
      self(self, depth + 1, std::move(hit), key | (static_cast<std::uint64_t>(o) << shift));
    }
  };
  recurse(recurse, 0, initial, 0);
  return dist;
}

DensityMatrix pure_density(const StateVector& state) {
  const Eigen::Index dim = static_cast<Eigen::Index>(state.dim());
  Eigen::VectorXcd psi(dim);
  for (Eigen::Index i = 0; i < dim; ++i) psi(i) = state[static_cast<std::size_t>(i)];
  return psi * psi.adjoint();
}

DensityMatrix channel_evolve(const DensityMatrix& rho, VertexId v, const ModelParams& params) {
  const Eigen::Index dim = rho.rows();
  if (rho.cols() != dim || dim < 2 || !std::has_single_bit(static_cast<std::uint64_t>(dim))) {
    throw OracleError("density matrix must be square with power-of-two dimension");
  }
  const int n_slots = std::countr_zero(static_cast<std::uint64_t>(dim));
  if (n_slots % 2 != 0 || n_slots / 2 > kMaxDensitySites) {
    throw OracleError("density matrices are limited to N <= 4 sites");
  }
  params.validate();
  const SlotPair s = vertex_slots(v, n_slots / 2);
  const Eigen::MatrixXcd u = embed_gate(build_rmatrix(params), s, n_slots);
  const JumpPair jumps = build_jump_pair(params.x);
  const Eigen::MatrixXcd evolved = u * rho * u.adjoint();
  DensityMatrix out = DensityMatrix::Zero(dim, dim);
  for (int o = 0; o < 4; ++o) {
    const Eigen::MatrixXcd j = embed_jump(KrausOutcome::from_index(o), s, jumps, n_slots);
    out += j * evolved * j.adjoint();
  }
  return out;
}

DensityCheck check_density(const DensityMatrix& rho) {
  DensityCheck c;
  c.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  c.trace_error = std::abs(rho.trace() - Amplitude(1.0, 0.0));
  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = solver.eigenvalues().minCoeff();
  return c;
}

CovarianceReport check_covariance(const StateVector& initial, int n_sites, int max_row,
                                  int max_vertices, const ModelParams& params,
                                  bool inject_misordered) {
  if (initial.n_slots() != 2 * n_sites) throw OracleError("state does not match lattice size");
  CovarianceReport report;
  for (const auto& stem : enumerate_stems(n_sites, max_row, max_vertices)) {
    if (stem.empty()) continue;
    ++report.stems;
    const auto extensions = linear_extensions(stem, n_sites);
    const StemDistribution reference = enumerate_stem(initial, extensions.front(), params);
    const auto pos = positions(reference.vertices);
    report.max_sum_error = std::max(report.max_sum_error, std::abs(reference.total() - 1.0));

    for (const auto& labelling : extensions) {
      ++report.labellings;
      const StemDistribution dist = enumerate_stem(initial, labelling, params);
      report.max_sum_error = std::max(report.max_sum_error, std::abs(dist.total() - 1.0));
      for (std::size_t key = 0; key < dist.table.size(); ++key) {
        report.max_labelling_difference =
            std::max(report.max_labelling_difference, std::abs(dist.table[key] - reference.table[key]));
      }
      if (inject_misordered) {
        std::vector<VertexId> reversed(labelling.rbegin(), labelling.rend());
        for (std::size_t key = 0; key < reference.table.size(); ++key) {
          const auto outs = outcomes_for(key, reversed, pos);
          const double p = stem_probability(initial, reversed, outs, params, CausalCheck::Skip);
          report.max_labelling_difference =
              std::max(report.max_labelling_difference, std::abs(p - reference.table[key]));
        }
      }
    }

    if (n_sites <= kMaxDensitySites) {
      const auto& labelling = extensions.back();
      for (std::size_t key = 0; key < reference.table.size(); ++key) {
        const auto outs = outcomes_for(key, labelling, pos);
        const double h = stem_probability_heisenberg(initial, labelling, outs, params);
        report.max_picture_difference =
            std::max(report.max_picture_difference, std::abs(h - reference.table[key]));
      }
    }
  }
  return report;
}

SamplerReport compare_sampler(const LatticeGeometry& geometry, const ModelParams& params,
                              const InitialState& initial, long long runs, MotionPolicy policy) {
  if (geometry.n_vertices() > kMaxStemVertices) {
    throw OracleError("sampler comparison needs a lattice with at most 8 vertices");
  }
  if (runs <= 0) throw OracleError("sampler comparison needs a positive run count");
  const auto labelling = sweep_labelling(geometry);
  const StemDistribution exact = enumerate_stem(initial.build(), labelling, params);
  const auto pos = positions(exact.vertices);

  std::vector<std::uint32_t> keys(static_cast<std::size_t>(runs));
  parallel_for(keys.size(), [&](std::size_t i) {
    ModelParams p = params;
    p.seed = params.seed + i;
    RunOptions options;
    options.policy = policy;
    options.keep_final_state = false;
    const TrajectoryRecord record = run_trajectory(geometry, p, initial, options);
    std::uint64_t key = 0;
    for (const StepEvent& ev : record.events) {
      key |= static_cast<std::uint64_t>(ev.outcome.index()) << (2 * pos.at(ev.vertex));
    }
    keys[i] = static_cast<std::uint32_t>(key);
  });

  std::vector<double> counts(exact.table.size(), 0.0);
  for (std::uint32_t key : keys) counts[key] += 1.0;
  SamplerReport report;
  report.runs = runs;
  const double n = static_cast<double>(runs);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double p = exact.table[k];
    report.total_variation += 0.5 * std::abs(counts[k] / n - p);
    report.expected_total_variation +=
        0.5 * std::sqrt(2.0 / std::numbers::pi) * std::sqrt(std::max(0.0, p * (1.0 - p)) / n);
    if (p > 0.0) {
      const double e = n * p;
      report.chi_square += (counts[k] - e) * (counts[k] - e) / e;
      ++report.dof;
    }
  }
  report.dof -= 1;
  report.p_value = report.dof > 0 ? boost::math::gamma_q(0.5 * report.dof, 0.5 * report.chi_square) : 1.0;
  return report;
}

ChannelReport compare_channel(const LatticeGeometry& geometry, const ModelParams& params,
                              const InitialState& initial, long long runs) {
  if (geometry.n_sites > kMaxDensitySites) {
    throw OracleError("channel comparison limited to N <= 4 sites");
  }
  if (runs <= 0) throw OracleError("channel comparison needs a positive run count");
  DensityMatrix channel = pure_density(initial.build());
  for (const VertexId& v : sweep_labelling(geometry)) channel = channel_evolve(channel, v, params);

  std::vector<StateVector> finals(static_cast<std::size_t>(runs), StateVector(geometry.n_slots()));
  parallel_for(finals.size(), [&](std::size_t i) {
    ModelParams p = params;
    p.seed = params.seed + i;
    finals[i] = *run_trajectory(geometry, p, initial).final_state;
  });
  const Eigen::Index dim = channel.rows();
  DensityMatrix average = DensityMatrix::Zero(dim, dim);
  for (const StateVector& psi : finals) average += pure_density(psi);
  average /= static_cast<double>(runs);

  ChannelReport report;
  report.runs = runs;
  report.max_abs_error = (average - channel).cwiseAbs().maxCoeff();
  report.channel_density = check_density(channel);
  return report;
}

}  // namespace collapse
