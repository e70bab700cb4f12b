#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace sanerf {

// Deterministic RNG wrapper. Distribution code is written out explicitly so
// streams are reproducible across standard libraries, and the full state
// (including the Box-Muller cache) round-trips through checkpoints.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : eng_(seed) {}

  uint64_t raw() { return eng_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  uint64_t below(uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % n;
  }

  double normal(double mean = 0.0, double stddev = 1.0) {
    if (has_cache_) {
      has_cache_ = false;
      return mean + stddev * cache_;
    }
    // Marsaglia polar method.
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    cache_ = v * m;
    has_cache_ = true;
    return mean + stddev * u * m;
  }

  // Derive an independent stream; used to give subsystems their own
  // sequences from one master seed.
  Rng fork(uint64_t salt) {
    return Rng(eng_() ^ (salt * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
  }

  std::string serialize() const;
  static Rng deserialize(const std::string& s);

 private:
  std::mt19937_64 eng_;
  bool has_cache_ = false;
  double cache_ = 0.0;
};

}  // namespace sanerf
