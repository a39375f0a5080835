#pragma once

#include <cstddef>

#include "collapse/kernels.hpp"

namespace collapse::kernels::detail {

// Helpers have internal linkage: this header is also compiled with -mavx2,
// and a shared inline definition could otherwise leak AVX encodings into the
// scalar path.
namespace {

struct PairLayout {
  std::size_t lo_bit;
  std::size_t hi_bit;
  std::array<std::size_t, 4> offset;  // by local class j
};

inline PairLayout pair_layout(int a, int b) {
  const int lo = a < b ? a : b;
  const int hi = a < b ? b : a;
  const std::size_t bit_a = std::size_t{1} << a;
  const std::size_t bit_b = std::size_t{1} << b;
  return {std::size_t{1} << lo, std::size_t{1} << hi, {0, bit_a, bit_b, bit_a | bit_b}};
}

/// Calls f(i) for each index i whose bits a and b are both zero, ascending.
template <class F>
inline void for_each_base(std::size_t dim, const PairLayout& layout, F&& f) {
  for (std::size_t h = 0; h < dim; h += 2 * layout.hi_bit) {
    for (std::size_t m = h; m < h + layout.hi_bit; m += 2 * layout.lo_bit) {
      for (std::size_t i = m; i < m + layout.lo_bit; ++i) f(i);
    }
  }
}

/// Calls f(start, count) for each contiguous run of base indices.
template <class F>
inline void for_each_base_run(std::size_t dim, const PairLayout& layout, F&& f) {
  for (std::size_t h = 0; h < dim; h += 2 * layout.hi_bit) {
    for (std::size_t m = h; m < h + layout.hi_bit; m += 2 * layout.lo_bit) {
      f(m, layout.lo_bit);
    }
  }
}

}  // namespace

void scalar_gate_pair(std::span<Amplitude> amps, int a, int b, const Gate4& gate,
                      ClassNorms* norms);
void scalar_pair_class_norms(std::span<const Amplitude> amps, int a, int b, ClassNorms& norms);
void scalar_scale_pair_classes(std::span<Amplitude> amps, int a, int b,
                               const ClassFactors& factors);
double scalar_norm_squared(std::span<const Amplitude> amps);

}  // namespace collapse::kernels::detail
