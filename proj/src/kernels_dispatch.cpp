#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_common.hpp"

namespace collapse::kernels {

namespace detail {
#ifdef COLLAPSE_HAVE_AVX2
const KernelSet& avx2_set();
#endif
}  // namespace detail

const KernelSet& scalar() {
  static const KernelSet set{"scalar", &detail::scalar_gate_pair,
                             &detail::scalar_pair_class_norms,
                             &detail::scalar_scale_pair_classes, &detail::scalar_norm_squared};
  return set;
}

const KernelSet* avx2() {
#ifdef COLLAPSE_HAVE_AVX2
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::avx2_set() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelSet* select_default() {
  if (const char* env = std::getenv("COLLAPSE_LATTICE_KERNEL")) {
    const std::string_view name(env);
    if (name == "scalar") return &scalar();
    if (name == "avx2" && avx2()) return avx2();
  }
  if (const KernelSet* k = avx2()) return k;
  return &scalar();
}

std::atomic<const KernelSet*>& active_slot() {
  static std::atomic<const KernelSet*> slot{select_default()};
  return slot;
}

}  // namespace

const KernelSet& active() { return *active_slot().load(std::memory_order_relaxed); }

void set_active(const KernelSet& set) { active_slot().store(&set, std::memory_order_relaxed); }

}  // namespace collapse::kernels
