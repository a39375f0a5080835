#pragma once

// State-vector inner loops over a pair of register slots.
//
// Amplitude index bit k is the field value on slot k (little-endian). For a
// slot pair (a, b) the local class of a basis index is
//
//     j = bit_a | (bit_b << 1)        j in {00, 01, 10, 11}
//
// and a Gate4 is indexed gate[row][col] in that local order. a may exceed b.
//
// Every kernel has a scalar reference implementation; vector variants are
// selected at runtime and must agree with it to rounding (see
// tests/test_kernels.cpp).

#include <array>
#include <complex>
#include <span>
#include <string_view>

namespace collapse {

using Amplitude = std::complex<double>;
using Gate4 = std::array<std::array<Amplitude, 4>, 4>;
using ClassNorms = std::array<double, 4>;
using ClassFactors = std::array<Amplitude, 4>;

namespace kernels {

struct KernelSet {
  std::string_view name;

  /// Applies gate to slots (a, b) in place. If norms is non-null it receives
  /// the per-class squared norms of the result.
  void (*gate_pair)(std::span<Amplitude> amps, int a, int b, const Gate4& gate,
                    ClassNorms* norms);

  /// Per-class squared norms over slots (a, b).
  void (*pair_class_norms)(std::span<const Amplitude> amps, int a, int b, ClassNorms& norms);

  /// Multiplies every amplitude of class j by factors[j].
  void (*scale_pair_classes)(std::span<Amplitude> amps, int a, int b,
                             const ClassFactors& factors);

  double (*norm_squared)(std::span<const Amplitude> amps);
};

const KernelSet& scalar();

/// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelSet* avx2();

/// The set used by the library: the widest supported variant, unless the
/// COLLAPSE_LATTICE_KERNEL environment variable names one ("scalar",
/// "avx2").
const KernelSet& active();

/// Overrides the active set (tests and benchmarks).
void set_active(const KernelSet& set);

}  // namespace kernels
}  // namespace collapse
