// AVX2/FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; it is reached through kernels::avx2() after a CPU check.

#include <immintrin.h>

#include "kernels_common.hpp"

namespace collapse::kernels::detail {

namespace {

// Two consecutive complex doubles per register: [re0, im0, re1, im1].
inline __m256d load2(const Amplitude* p) {
  return _mm256_loadu_pd(reinterpret_cast<const double*>(p));
}

inline void store2(Amplitude* p, __m256d v) {
  _mm256_storeu_pd(reinterpret_cast<double*>(p), v);
}

inline __m256d swap_re_im(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

// v * (fr + i fi) for both packed complex values.
inline __m256d cmul(__m256d v, __m256d fr, __m256d fi) {
  return _mm256_fmaddsub_pd(v, fr, _mm256_mul_pd(swap_re_im(v), fi));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void avx2_gate_pair(std::span<Amplitude> amps, int a, int b, const Gate4& gate,
                    ClassNorms* norms) {
  const PairLayout layout = pair_layout(a, b);
  if (layout.lo_bit < 2) {
    scalar_gate_pair(amps, a, b, gate, norms);
    return;
  }
  __m256d gr[4][4], gi[4][4];
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      gr[r][c] = _mm256_set1_pd(gate[r][c].real());
      gi[r][c] = _mm256_set1_pd(gate[r][c].imag());
    }
  }
  __m256d acc[4] = {_mm256_setzero_pd(), _mm256_setzero_pd(), _mm256_setzero_pd(),
                    _mm256_setzero_pd()};
  Amplitude* base = amps.data();
  for_each_base_run(amps.size(), layout, [&](std::size_t start, std::size_t count) {
    for (std::size_t i = start; i < start + count; i += 2) {
      __m256d x[4], xs[4];
      for (int c = 0; c < 4; ++c) {
        x[c] = load2(base + i + layout.offset[c]);
        xs[c] = swap_re_im(x[c]);
      }
      for (int r = 0; r < 4; ++r) {
        __m256d direct = _mm256_mul_pd(x[0], gr[r][0]);
        __m256d crossed = _mm256_mul_pd(xs[0], gi[r][0]);
        for (int c = 1; c < 4; ++c) {
          direct = _mm256_fmadd_pd(x[c], gr[r][c], direct);
          crossed = _mm256_fmadd_pd(xs[c], gi[r][c], crossed);
        }
        const __m256d y = _mm256_addsub_pd(direct, crossed);
        store2(base + i + layout.offset[r], y);
        acc[r] = _mm256_fmadd_pd(y, y, acc[r]);
      }
    }
  });
  if (norms) {
    for (int r = 0; r < 4; ++r) (*norms)[r] = hsum(acc[r]);
  }
}

void avx2_pair_class_norms(std::span<const Amplitude> amps, int a, int b, ClassNorms& norms) {
  const PairLayout layout = pair_layout(a, b);
  if (layout.lo_bit < 2) {
    scalar_pair_class_norms(amps, a, b, norms);
    return;
  }
  __m256d acc[4] = {_mm256_setzero_pd(), _mm256_setzero_pd(), _mm256_setzero_pd(),
                    _mm256_setzero_pd()};
  const Amplitude* base = amps.data();
  for_each_base_run(amps.size(), layout, [&](std::size_t start, std::size_t count) {
    for (std::size_t i = start; i < start + count; i += 2) {
      for (int j = 0; j < 4; ++j) {
        const __m256d x = load2(base + i + layout.offset[j]);
        acc[j] = _mm256_fmadd_pd(x, x, acc[j]);
      }
    }
  });
  for (int j = 0; j < 4; ++j) norms[j] = hsum(acc[j]);
}

void avx2_scale_pair_classes(std::span<Amplitude> amps, int a, int b,
                             const ClassFactors& factors) {
  const PairLayout layout = pair_layout(a, b);
  if (layout.lo_bit < 2) {
    scalar_scale_pair_classes(amps, a, b, factors);
    return;
  }
  __m256d fr[4], fi[4];
  for (int j = 0; j < 4; ++j) {
    fr[j] = _mm256_set1_pd(factors[j].real());
    fi[j] = _mm256_set1_pd(factors[j].imag());
  }
  Amplitude* base = amps.data();
  for_each_base_run(amps.size(), layout, [&](std::size_t start, std::size_t count) {
    for (std::size_t i = start; i < start + count; i += 2) {
      for (int j = 0; j < 4; ++j) {
        Amplitude* p = base + i + layout.offset[j];
        store2(p, cmul(load2(p), fr[j], fi[j]));
      }
    }
  });
}

double avx2_norm_squared(std::span<const Amplitude> amps) {
  const std::size_t n = amps.size();
  if (n < 2) return scalar_norm_squared(amps);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x0 = load2(amps.data() + i);
    const __m256d x1 = load2(amps.data() + i + 2);
    acc0 = _mm256_fmadd_pd(x0, x0, acc0);
    acc1 = _mm256_fmadd_pd(x1, x1, acc1);
  }
  double total = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) total += amps[i].real() * amps[i].real() + amps[i].imag() * amps[i].imag();
  return total;
}

}  // namespace

const KernelSet& avx2_set() {
  static const KernelSet set{"avx2", &avx2_gate_pair, &avx2_pair_class_norms,
                             &avx2_scale_pair_classes, &avx2_norm_squared};
  return set;
}

}  // namespace collapse::kernels::detail
