#include "data/texture.h"

#include <cmath>

namespace sanerf::data {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double lattice(std::int64_t ix, std::int64_t iy, std::int64_t iz,
               std::uint32_t seed) {
  std::uint64_t h = splitmix64(std::uint64_t(ix) * 0x8da6b343ULL ^
                               std::uint64_t(iy) * 0xd8163841ULL ^
                               std::uint64_t(iz) * 0xcb1ab31fULL ^
                               (std::uint64_t(seed) << 32));
  return double(h >> 11) * 0x1.0p-53;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

}  // namespace

double value_noise3(const geom::Vec3& x, std::uint32_t seed) {
  std::int64_t ix = std::int64_t(std::floor(x.x()));
  std::int64_t iy = std::int64_t(std::floor(x.y()));
  std::int64_t iz = std::int64_t(std::floor(x.z()));
  double fx = smoothstep(x.x() - double(ix));
  double fy = smoothstep(x.y() - double(iy));
  double fz = smoothstep(x.z() - double(iz));
  double acc = 0;
  for (int dz = 0; dz < 2; ++dz)
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx) {
        double w = (dx ? fx : 1 - fx) * (dy ? fy : 1 - fy) * (dz ? fz : 1 - fz);
        acc += w * lattice(ix + dx, iy + dy, iz + dz, seed);
      }
  return acc;
}

Eigen::Vector3f eval_texture(const TextureSpec& tex, const geom::Vec3& x) {
  using Kind = TextureSpec::Kind;
  switch (tex.kind) {
    case Kind::kFlat:
      return tex.c0;
    case Kind::kChecker: {
      std::int64_t p = std::int64_t(std::floor(x.x() * tex.scale)) +
                       std::int64_t(std::floor(x.y() * tex.scale)) +
                       std::int64_t(std::floor(x.z() * tex.scale));
      return (p & 1) ? tex.c1 : tex.c0;
    }
    case Kind::kNoise: {
      // two octaves keep it smooth enough for a small field to fit
      double t = 0.7 * value_noise3(x * double(tex.scale), tex.seed) +
                 0.3 * value_noise3(x * (2.0 * double(tex.scale)), tex.seed + 7);
      return tex.c0 + float(t) * (tex.c1 - tex.c0);
    }
    case Kind::kGradient: {
      // direction derived from the seed, smooth sinusoidal blend
      std::uint64_t h = splitmix64(tex.seed + 101);
      geom::Vec3 n(0.3 + double((h >> 0) & 1023) / 1023.0,
                   0.3 + double((h >> 10) & 1023) / 1023.0,
                   0.3 + double((h >> 20) & 1023) / 1023.0);
      n.normalize();
      double t = 0.5 + 0.5 * std::sin(n.dot(x) * double(tex.scale));
      return tex.c0 + float(t) * (tex.c1 - tex.c0);
    }
  }
  return tex.c0;
}

}  // namespace sanerf::data
