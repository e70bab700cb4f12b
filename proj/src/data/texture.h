#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "geom/geometry.h"

namespace sanerf::data {

// Procedural 3-D textures evaluated at world-space points. The scenes are
// unlit: an opaque surface shows exactly eval_texture(x) at the hit point,
// which makes the analytic tracer and a view-independent radiance field agree.
struct TextureSpec {
  enum class Kind { kFlat, kChecker, kNoise, kGradient };
  Kind kind = Kind::kFlat;
  Eigen::Vector3f c0{0.5f, 0.5f, 0.5f};
  Eigen::Vector3f c1{0.5f, 0.5f, 0.5f};
  float scale = 1.0f;
  std::uint32_t seed = 0;
};

Eigen::Vector3f eval_texture(const TextureSpec& tex, const geom::Vec3& x);

// smooth value noise in [0,1]: hashed lattice, smoothstep-interpolated
double value_noise3(const geom::Vec3& x, std::uint32_t seed);

}  // namespace sanerf::data
