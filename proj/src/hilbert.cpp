#include "collapse/hilbert.hpp"

#include <cmath>

namespace collapse {

FieldConfig::FieldConfig(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (std::uint8_t b : bits_) {
    if (b > 1) throw HilbertError("field values must be 0 or 1");
  }
  if (bits_.size() > static_cast<std::size_t>(kMaxSlots)) {
    throw HilbertError("field configuration longer than " + std::to_string(kMaxSlots) + " slots");
  }
}

FieldConfig FieldConfig::zeros(int n_slots) {
  return FieldConfig(std::vector<std::uint8_t>(static_cast<std::size_t>(n_slots), 0));
}

FieldConfig FieldConfig::parse(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char ch : text) {
    if (ch != '0' && ch != '1') {
      throw HilbertError("bitstring may contain only '0' and '1': \"" + std::string(text) + "\"");
    }
    bits.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  return FieldConfig(std::move(bits));
}

FieldConfig FieldConfig::from_index(std::uint64_t index, int n_slots) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n_slots));
  for (int k = 0; k < n_slots; ++k) bits[k] = static_cast<std::uint8_t>((index >> k) & 1u);
  return FieldConfig(std::move(bits));
}

std::uint64_t FieldConfig::index() const {
  std::uint64_t out = 0;
  for (std::size_t k = 0; k < bits_.size(); ++k) out |= std::uint64_t{bits_[k]} << k;
  return out;
}

int FieldConfig::occupation() const {
  int n = 0;
  for (std::uint8_t b : bits_) n += b;
  return n;
}

std::string FieldConfig::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (std::uint8_t b : bits_) s.push_back(static_cast<char>('0' + b));
  return s;
}

StateVector::StateVector(int n_slots) : n_slots_(n_slots) {
  if (n_slots < 1 || n_slots > kMaxSlots) {
    throw HilbertError("state vector needs 1.." + std::to_string(kMaxSlots) + " slots, got " +
                       std::to_string(n_slots));
  }
  amps_.assign(std::size_t{1} << n_slots, Amplitude(0.0, 0.0));
}

double StateVector::norm_squared() const { return kernels::active().norm_squared(amps_); }

JumpPair build_jump_pair(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw HilbertError("jump parameter X must lie in [0, 1], got " + std::to_string(x));
  }
  const double s = 1.0 / std::sqrt(1.0 + x * x);
  return JumpPair{{s, x * s}, {x * s, s}};
}

StateVector eigenstate(const FieldConfig& config) {
  StateVector state(config.n_slots());
  state[config.index()] = Amplitude(1.0, 0.0);
  return state;
}

StateVector superpose(const FieldConfig& c1, const FieldConfig& c2) {
  if (c1.n_slots() != c2.n_slots()) {
    throw HilbertError("superposed configurations differ in length");
  }
  if (c1 == c2) {
    throw HilbertError("cannot superpose a configuration with itself");
  }
  StateVector state(c1.n_slots());
  const double amp = 1.0 / std::sqrt(2.0);
  state[c1.index()] = Amplitude(amp, 0.0);
  state[c2.index()] = Amplitude(amp, 0.0);
  return state;
}

void check_slot_pair(const StateVector& state, int slot_a, int slot_b) {
  const int n = state.n_slots();
  if (slot_a < 0 || slot_a >= n || slot_b < 0 || slot_b >= n) {
    throw HilbertError("slot index out of range: (" + std::to_string(slot_a) + ", " +
                       std::to_string(slot_b) + ") for " + std::to_string(n) + " slots");
  }
  if (slot_a == slot_b) {
    throw HilbertError("two-slot operation needs distinct slots, got " + std::to_string(slot_a));
  }
}

void apply_two_slot_gate_in_place(StateVector& state, int slot_a, int slot_b,
                                  const Gate4& gate) {
  check_slot_pair(state, slot_a, slot_b);
  kernels::active().gate_pair(state.amplitudes(), slot_a, slot_b, gate, nullptr);
}

StateVector apply_two_slot_gate(const StateVector& state, int slot_a, int slot_b,
                                const Gate4& gate) {
  StateVector out = state;
  apply_two_slot_gate_in_place(out, slot_a, slot_b, gate);
  return out;
}

std::array<double, 4> kraus_outcome_weights(const ClassNorms& norms, const JumpPair& jumps) {
  std::array<double, 4> w{};
  for (int o = 0; o < 4; ++o) {
    const KrausOutcome out = KrausOutcome::from_index(o);
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) {
      const double f = jumps.element(out.bit_a, j & 1) * jumps.element(out.bit_b, j >> 1);
      sum += norms[j] * f * f;
    }
    w[o] = sum;
  }
  return w;
}

std::array<double, 4> kraus_class_factors(KrausOutcome outcome, const JumpPair& jumps,
                                          double weight) {
  const double inv = 1.0 / std::sqrt(weight);
  std::array<double, 4> f{};
  for (int j = 0; j < 4; ++j) {
    f[j] = jumps.element(outcome.bit_a, j & 1) * jumps.element(outcome.bit_b, j >> 1) * inv;
  }
  return f;
}

double apply_two_slot_kraus_in_place(StateVector& state, int slot_a, int slot_b,
                                     KrausOutcome outcome, double x) {
  check_slot_pair(state, slot_a, slot_b);
  if (outcome.bit_a < 0 || outcome.bit_a > 1 || outcome.bit_b < 0 || outcome.bit_b > 1) {
    throw HilbertError("Kraus outcome bits must be 0 or 1");
  }
  const JumpPair jumps = build_jump_pair(x);
  const auto& k = kernels::active();
  ClassNorms norms{};
  k.pair_class_norms(state.amplitudes(), slot_a, slot_b, norms);
  const double weight = kraus_outcome_weights(norms, jumps)[outcome.index()];
  if (!(weight >= kZeroProbability)) {
    throw HilbertError("attempt to realise a zero-probability outcome (weight " +
                       std::to_string(weight) + ")");
  }
  const auto f = kraus_class_factors(outcome, jumps, weight);
  k.scale_pair_classes(state.amplitudes(), slot_a, slot_b,
                       ClassFactors{f[0], f[1], f[2], f[3]});
  return weight;
}

KrausResult apply_two_slot_kraus(const StateVector& state, int slot_a, int slot_b,
                                 KrausOutcome outcome, double x) {
  StateVector out = state;
  const double weight = apply_two_slot_kraus_in_place(out, slot_a, slot_b, outcome, x);
  return KrausResult{std::move(out), weight};
}

double stuff(const StateVector& state, int slot) {
  if (slot < 0 || slot >= state.n_slots()) {
    throw HilbertError("slot index out of range: " + std::to_string(slot));
  }
  const std::size_t bit = std::size_t{1} << slot;
  double sum = 0.0;
  const auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & bit) sum += std::norm(amps[i]);
  }
  return sum;
}

double branch_weight(const StateVector& state, const FieldConfig& config) {
  if (config.n_slots() != state.n_slots()) {
    throw HilbertError("configuration length does not match the state");
  }
  return std::norm(state[config.index()]);
}

}  // namespace collapse
