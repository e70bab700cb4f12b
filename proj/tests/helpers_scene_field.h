#pragma once

// Test support: an analytic "ground truth" radiance field built directly from
// a scene description. Density is a hard indicator of solid matter (the room
// counts as solid outside its walls), color is the volumetric texture, so a
// converged renderer must reproduce the analytic tracer.

#include <vector>

#include "data/scene.h"
#include "data/texture.h"
#include "render/renderer.h"

namespace sanerf::testutil {

inline bool solid_at(const data::SceneDesc& sc, const geom::Vec3& p,
                     const data::TextureSpec** tex) {
  for (const auto& s : sc.spheres)
    if ((p - s.center).squaredNorm() < s.radius * s.radius) {
      *tex = &s.tex;
      return true;
    }
  for (const auto& b : sc.boxes)
    if ((p.array() > b.lo.array()).all() && (p.array() < b.hi.array()).all()) {
      *tex = &b.tex;
      return true;
    }
  if (sc.room) {
    const auto& r = *sc.room;
    if (!((p.array() > r.lo.array()).all() &&
          (p.array() < r.hi.array()).all())) {
      *tex = &r.tex;
      return true;
    }
  }
  return false;
}

template <typename T>
render::FieldFn<T> scene_field(const data::SceneDesc& sc,
                               T sigma_solid = T(1e4)) {
  return [&sc, sigma_solid](ad::Graph<T>& g, int pos, int dir) {
    (void)dir;
    const auto& pv = g.val(pos);
    std::size_t n = g.shape(pos).rows;
    std::vector<T> sigma(n, T(0)), rgb(n * 3, T(0));
    for (std::size_t i = 0; i < n; ++i) {
      geom::Vec3 p(pv[i * 3], pv[i * 3 + 1], pv[i * 3 + 2]);
      const data::TextureSpec* tex = nullptr;
      if (solid_at(sc, p, &tex)) {
        sigma[i] = sigma_solid;
        Eigen::Vector3f c = data::eval_texture(*tex, p);
        rgb[i * 3] = T(c.x());
        rgb[i * 3 + 1] = T(c.y());
        rgb[i * 3 + 2] = T(c.z());
      }
    }
    field::FieldOut<T> out;
    out.sigma = g.constant({n, 1}, sigma);
    out.rgb = g.constant({n, 3}, rgb);
    return out;
  };
}

}  // namespace sanerf::testutil
