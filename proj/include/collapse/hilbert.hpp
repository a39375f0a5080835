#pragma once

// Dense state vector over the 2N link slots of a surface.
//
// Basis index bit k holds the field value on slot k. Text bitstrings list
// slot 0 first: "0100" has a particle on slot 1 (index 0b0010).

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "collapse/kernels.hpp"

namespace collapse {

class HilbertError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxSlots = 24;

/// Outcomes with weight below this are treated as impossible.
inline constexpr double kZeroProbability = 1e-300;

class FieldConfig {
 public:
  FieldConfig() = default;
  explicit FieldConfig(std::vector<std::uint8_t> bits);

  static FieldConfig zeros(int n_slots);
  static FieldConfig parse(std::string_view text);
  static FieldConfig from_index(std::uint64_t index, int n_slots);

  int n_slots() const { return static_cast<int>(bits_.size()); }
  int operator[](int slot) const { return bits_.at(static_cast<std::size_t>(slot)); }
  std::uint64_t index() const;
  int occupation() const;
  std::string to_string() const;

  bool operator==(const FieldConfig&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

class StateVector {
 public:
  /// All amplitudes zero; n_slots in [1, kMaxSlots].
  explicit StateVector(int n_slots);

  int n_slots() const { return n_slots_; }
  std::size_t dim() const { return amps_.size(); }

  std::span<Amplitude> amplitudes() { return amps_; }
  std::span<const Amplitude> amplitudes() const { return amps_; }
  Amplitude operator[](std::size_t i) const { return amps_[i]; }
  Amplitude& operator[](std::size_t i) { return amps_[i]; }

  double norm_squared() const;

  bool operator==(const StateVector&) const = default;

 private:
  int n_slots_;
  std::vector<Amplitude> amps_;
};

/// Soft-measurement pair J0 = diag(1, X)/sqrt(1+X^2), J1 = diag(X, 1)/sqrt(1+X^2).
struct JumpPair {
  std::array<double, 2> j0;  // diagonal, indexed by the field value
  std::array<double, 2> j1;

  double element(int outcome, int bit) const { return outcome == 0 ? j0[bit] : j1[bit]; }
};

/// Throws HilbertError unless 0 <= x <= 1.
JumpPair build_jump_pair(double x);

/// Two-slot outcome; local index bit_a | bit_b << 1.
struct KrausOutcome {
  int bit_a = 0;
  int bit_b = 0;

  int index() const { return bit_a | (bit_b << 1); }
  static KrausOutcome from_index(int j) { return {j & 1, (j >> 1) & 1}; }
  bool operator==(const KrausOutcome&) const = default;
};

struct KrausResult {
  StateVector state;
  double weight;
};

StateVector eigenstate(const FieldConfig& config);

/// (|c1> + |c2>)/sqrt(2); throws if c1 == c2 or sizes differ.
StateVector superpose(const FieldConfig& c1, const FieldConfig& c2);

void check_slot_pair(const StateVector& state, int slot_a, int slot_b);

StateVector apply_two_slot_gate(const StateVector& state, int slot_a, int slot_b,
                                const Gate4& gate);
void apply_two_slot_gate_in_place(StateVector& state, int slot_a, int slot_b, const Gate4& gate);

/// Outcome probabilities from the class norms of the two slots, by outcome index.
std::array<double, 4> kraus_outcome_weights(const ClassNorms& norms, const JumpPair& jumps);

/// Class scale factors realising outcome o with weight w: J(o)/sqrt(w).
std::array<double, 4> kraus_class_factors(KrausOutcome outcome, const JumpPair& jumps,
                                          double weight);

/// Applies J(outcome) = J_{bit_a} (x) J_{bit_b}, renormalises to unit norm and
/// returns the outcome probability ||J|psi>||^2. Throws HilbertError when
/// that probability is below kZeroProbability.
KrausResult apply_two_slot_kraus(const StateVector& state, int slot_a, int slot_b,
                                 KrausOutcome outcome, double x);
double apply_two_slot_kraus_in_place(StateVector& state, int slot_a, int slot_b,
                                     KrausOutcome outcome, double x);

/// Squared amplitude for field value 1 on a slot.
double stuff(const StateVector& state, int slot);

/// |<config|state>|^2.
double branch_weight(const StateVector& state, const FieldConfig& config);

}  // namespace collapse
