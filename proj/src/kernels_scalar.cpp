#include "kernels_common.hpp"

namespace collapse::kernels::detail {

// Complex arithmetic is spelled out on (re, im) pairs: std::complex operator*
// goes through the Annex G NaN-recovery path, which is slow and never needed
// for finite amplitudes.

void scalar_gate_pair(std::span<Amplitude> amps, int a, int b, const Gate4& gate,
                      ClassNorms* norms) {
  const PairLayout layout = pair_layout(a, b);
  double gr[4][4], gi[4][4];
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      gr[r][c] = gate[r][c].real();
      gi[r][c] = gate[r][c].imag();
    }
  }
  ClassNorms acc{0.0, 0.0, 0.0, 0.0};
  for_each_base(amps.size(), layout, [&](std::size_t i) {
    double xr[4], xi[4];
    for (int c = 0; c < 4; ++c) {
      xr[c] = amps[i + layout.offset[c]].real();
      xi[c] = amps[i + layout.offset[c]].imag();
    }
    for (int r = 0; r < 4; ++r) {
      double yr = 0.0, yi = 0.0;
      for (int c = 0; c < 4; ++c) {
        yr += gr[r][c] * xr[c] - gi[r][c] * xi[c];
        yi += gr[r][c] * xi[c] + gi[r][c] * xr[c];
      }
      amps[i + layout.offset[r]] = Amplitude(yr, yi);
      acc[r] += yr * yr + yi * yi;
    }
  });
  if (norms) *norms = acc;
}

void scalar_pair_class_norms(std::span<const Amplitude> amps, int a, int b, ClassNorms& norms) {
  const PairLayout layout = pair_layout(a, b);
  ClassNorms acc{0.0, 0.0, 0.0, 0.0};
  for_each_base(amps.size(), layout, [&](std::size_t i) {
    for (int j = 0; j < 4; ++j) {
      const Amplitude z = amps[i + layout.offset[j]];
      acc[j] += z.real() * z.real() + z.imag() * z.imag();
    }
  });
  norms = acc;
}

void scalar_scale_pair_classes(std::span<Amplitude> amps, int a, int b,
                               const ClassFactors& factors) {
  const PairLayout layout = pair_layout(a, b);
  for_each_base(amps.size(), layout, [&](std::size_t i) {
    for (int j = 0; j < 4; ++j) {
      Amplitude& z = amps[i + layout.offset[j]];
      const double fr = factors[j].real(), fi = factors[j].imag();
      z = Amplitude(fr * z.real() - fi * z.imag(), fr * z.imag() + fi * z.real());
    }
  });
}

double scalar_norm_squared(std::span<const Amplitude> amps) {
  double acc = 0.0;
  for (const Amplitude& z : amps) acc += z.real() * z.real() + z.imag() * z.imag();
  return acc;
}

}  // namespace collapse::kernels::detail
