#include <atomic>

#include "kern.h"

namespace sanerf::kern {
namespace {

std::atomic<bool> g_force_scalar{false};

struct Tables {
  Table<float> f32;
  Table<double> f64;
  bool simd = false;
  Tables() {
    f32 = scalar_table<float>();
    f64 = scalar_table<double>();
#if defined(SANERF_HAVE_X86)
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
      install_avx2(f32, f64);
      simd = true;
    }
#endif
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

template <>
const Table<float>& active_table<float>() {
  if (g_force_scalar.load(std::memory_order_relaxed)) return scalar_table<float>();
  return tables().f32;
}

template <>
const Table<double>& active_table<double>() {
  if (g_force_scalar.load(std::memory_order_relaxed)) return scalar_table<double>();
  return tables().f64;
}

void set_force_scalar(bool force) { g_force_scalar.store(force); }

bool simd_available() { return tables().simd; }

const char* active_isa() {
  if (g_force_scalar.load(std::memory_order_relaxed) || !tables().simd)
    return "scalar";
  return "avx2";
}

}  // namespace sanerf::kern
