#include "data/scene.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sanerf::data {
namespace {

constexpr double kPi = std::numbers::pi;

bool hit_sphere(const SphereObj& s, const geom::Vec3& o, const geom::Vec3& d,
                double tmin, double& t) {
  geom::Vec3 oc = o - s.center;
  double b = oc.dot(d);
  double c = oc.squaredNorm() - s.radius * s.radius;
  double disc = b * b - c;
  if (disc < 0) return false;
  double sq = std::sqrt(disc);
  t = -b - sq;
  if (t <= tmin) t = -b + sq;
  return t > tmin;
}

// slab test; reports the near face when outside, the far face when the ray
// starts inside (which is how the enclosing room is seen)
bool hit_box(const BoxObj& b, const geom::Vec3& o, const geom::Vec3& d,
             double tmin, double& t) {
  double t0 = -1e300, t1 = 1e300;
  for (int i = 0; i < 3; ++i) {
    double inv = 1.0 / d(i);  // +-inf for axis-parallel rays is fine
    double ta = (b.lo(i) - o(i)) * inv;
    double tb = (b.hi(i) - o(i)) * inv;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  if (t0 > tmin) {
    t = t0;
    return true;
  }
  if (t1 > tmin) {
    t = t1;
    return true;
  }
  return false;
}

geom::Vec3 box_normal(const BoxObj& b, const geom::Vec3& p,
                      const geom::Vec3& d) {
  geom::Vec3 c = 0.5 * (b.lo + b.hi);
  geom::Vec3 half = 0.5 * (b.hi - b.lo);
  geom::Vec3 rel = p - c;
  int axis = 0;
  double best = -1;
  for (int i = 0; i < 3; ++i) {
    double f = std::abs(rel(i)) / half(i);
    if (f > best) {
      best = f;
      axis = i;
    }
  }
  geom::Vec3 n = geom::Vec3::Zero();
  n(axis) = rel(axis) >= 0 ? 1.0 : -1.0;
  if (n.dot(d) > 0) n = -n;  // two-sided
  return n;
}

}  // namespace

Hit trace(const SceneDesc& sc, const geom::Vec3& o, const geom::Vec3& d,
          double tmin) {
  Hit best;
  best.t = 1e300;
  int id = 0;
  for (const auto& s : sc.spheres) {
    double t;
    if (hit_sphere(s, o, d, tmin, t) && t < best.t) {
      best.valid = true;
      best.t = t;
      best.obj_id = id;
      best.point = o + t * d;
      best.normal = (best.point - s.center).normalized();
      if (best.normal.dot(d) > 0) best.normal = -best.normal;
      best.color = eval_texture(s.tex, best.point);
    }
    ++id;
  }
  auto try_box = [&](const BoxObj& b) {
    double t;
    if (hit_box(b, o, d, tmin, t) && t < best.t) {
      best.valid = true;
      best.t = t;
      best.obj_id = id;
      best.point = o + t * d;
      best.normal = box_normal(b, best.point, d);
      best.color = eval_texture(b.tex, best.point);
    }
    ++id;
  };
  for (const auto& b : sc.boxes) try_box(b);
  if (sc.room) try_box(*sc.room);
  if (!best.valid) best.t = 0;
  return best;
}

Image render_scene(const SceneDesc& sc, const geom::Pose& cam,
                   const geom::Intrinsics& k) {
  Image img(k.width, k.height);
  for (int y = 0; y < k.height; ++y)
    for (int x = 0; x < k.width; ++x) {
      auto ray = geom::make_ray(cam, k, double(x), double(y));
      Hit h = trace(sc, ray.o, ray.d);
      if (h.valid)
        for (int c = 0; c < 3; ++c) img.at(x, y)[c] = h.color(c);
    }
  return img;
}

bool visible(const SceneDesc& sc, const geom::Vec3& point,
             const geom::Pose& cam) {
  geom::Vec3 diff = point - cam.t;
  double dist = diff.norm();
  if (dist < 1e-9) return false;
  Hit h = trace(sc, cam.t, diff / dist);
  return h.valid && h.t >= dist - 1e-6 * std::max(1.0, dist) - 1e-9;
}

std::vector<GtPoint> sample_surface_points(const SceneDesc& sc, int count,
                                           std::uint64_t seed) {
  Rng rng(seed);
  struct Entry {
    double cum_area;
    int kind;  // 0 sphere, 1 box
    int idx;
  };
  std::vector<Entry> entries;
  double total = 0;
  for (std::size_t i = 0; i < sc.spheres.size(); ++i) {
    total += 4 * kPi * sc.spheres[i].radius * sc.spheres[i].radius;
    entries.push_back({total, 0, int(i)});
  }
  for (std::size_t i = 0; i < sc.boxes.size(); ++i) {
    geom::Vec3 e = sc.boxes[i].hi - sc.boxes[i].lo;
    total += 2 * (e.x() * e.y() + e.y() * e.z() + e.z() * e.x());
    entries.push_back({total, 1, int(i)});
  }
  SANERF_CHECK(!entries.empty() && total > 0,
               "sample_surface_points: scene has no objects");

  std::vector<GtPoint> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    double r = rng.uniform(0, total);
    const Entry* e = &entries.back();
    for (const auto& cand : entries)
      if (r <= cand.cum_area) {
        e = &cand;
        break;
      }
    GtPoint p;
    p.id = k;
    if (e->kind == 0) {
      const auto& s = sc.spheres[e->idx];
      geom::Vec3 n(rng.normal(), rng.normal(), rng.normal());
      while (n.norm() < 1e-9) n = {rng.normal(), rng.normal(), rng.normal()};
      p.xyz = s.center + s.radius * n.normalized();
    } else {
      const auto& b = sc.boxes[e->idx];
      geom::Vec3 ext = b.hi - b.lo;
      double faces[6] = {ext.y() * ext.z(), ext.y() * ext.z(),
                         ext.x() * ext.z(), ext.x() * ext.z(),
                         ext.x() * ext.y(), ext.x() * ext.y()};
      double ft = 0;
      for (double f : faces) ft += f;
      double fr = rng.uniform(0, ft);
      int face = 5;
      double acc = 0;
      for (int i = 0; i < 6; ++i) {
        acc += faces[i];
        if (fr <= acc) {
          face = i;
          break;
        }
      }
      double a = rng.uniform(), c = rng.uniform();
      geom::Vec3 q = b.lo;
      switch (face) {
        case 0: q = {b.lo.x(), b.lo.y() + a * ext.y(), b.lo.z() + c * ext.z()}; break;
        case 1: q = {b.hi.x(), b.lo.y() + a * ext.y(), b.lo.z() + c * ext.z()}; break;
        case 2: q = {b.lo.x() + a * ext.x(), b.lo.y(), b.lo.z() + c * ext.z()}; break;
        case 3: q = {b.lo.x() + a * ext.x(), b.hi.y(), b.lo.z() + c * ext.z()}; break;
        case 4: q = {b.lo.x() + a * ext.x(), b.lo.y() + c * ext.y(), b.lo.z()}; break;
        case 5: q = {b.lo.x() + a * ext.x(), b.lo.y() + c * ext.y(), b.hi.z()}; break;
      }
      p.xyz = q;
    }
    out.push_back(p);
  }
  return out;
}

std::vector<OracleMatch> oracle_matches(const SceneDesc& sc,
                                        const std::vector<GtPoint>& pts,
                                        int cam_i, int cam_j, double margin) {
  SANERF_CHECK(cam_i >= 0 && cam_i < int(sc.cams.size()) && cam_j >= 0 &&
                   cam_j < int(sc.cams.size()),
               "oracle_matches: camera index out of range");
  std::vector<OracleMatch> out;
  const auto& k = sc.intr;
  for (const auto& p : pts) {
    OracleMatch m;
    m.id = p.id;
    if (!geom::project(sc.cams[cam_i], k, p.xyz, m.ui, m.vi)) continue;
    if (!geom::project(sc.cams[cam_j], k, p.xyz, m.uj, m.vj)) continue;
    if (m.ui < margin || m.ui > k.width - 1 - margin || m.vi < margin ||
        m.vi > k.height - 1 - margin)
      continue;
    if (m.uj < margin || m.uj > k.width - 1 - margin || m.vj < margin ||
        m.vj > k.height - 1 - margin)
      continue;
    if (!visible(sc, p.xyz, sc.cams[cam_i])) continue;
    if (!visible(sc, p.xyz, sc.cams[cam_j])) continue;
    out.push_back(m);
  }
  return out;
}

SceneDesc generate_scene(const GenConfig& cfg) {
  SANERF_CHECK(cfg.n_images >= 2, "generate_scene: need at least 2 images");
  Rng rng(cfg.seed);
  SceneDesc sc;
  sc.seed = cfg.seed;

  auto rand_color = [&]() {
    return Eigen::Vector3f(float(0.12 + 0.78 * rng.uniform()),
                           float(0.12 + 0.78 * rng.uniform()),
                           float(0.12 + 0.78 * rng.uniform()));
  };
  auto make_tex = [&](int i) {
    TextureSpec t;
    t.c0 = rand_color();
    t.c1 = rand_color();
    t.seed = std::uint32_t(rng.below(1u << 30));
    switch (i % 3) {
      case 0:
        t.kind = TextureSpec::Kind::kNoise;
        t.scale = float((1.5 + 1.5 * rng.uniform()) * cfg.texture_scale);
        break;
      case 1:
        t.kind = TextureSpec::Kind::kGradient;
        t.scale = float((2.0 + 3.0 * rng.uniform()) * cfg.texture_scale);
        break;
      default:
        t.kind = TextureSpec::Kind::kChecker;
        t.scale = float((2.0 + 2.0 * rng.uniform()) * cfg.texture_scale);
        break;
    }
    return t;
  };

  for (int i = 0; i < cfg.n_spheres; ++i) {
    SphereObj s;
    s.center = {rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.8),
                rng.uniform(-1.0, 1.0)};
    s.radius = rng.uniform(0.22, 0.5);
    s.tex = make_tex(i);
    sc.spheres.push_back(s);
  }
  for (int i = 0; i < cfg.n_boxes; ++i) {
    geom::Vec3 c(rng.uniform(-1.2, 1.2), rng.uniform(-0.6, 0.4),
                 rng.uniform(-1.2, 1.2));
    geom::Vec3 h(rng.uniform(0.15, 0.45), rng.uniform(0.15, 0.45),
                 rng.uniform(0.15, 0.45));
    BoxObj b;
    b.lo = c - h;
    b.hi = c + h;
    b.tex = make_tex(cfg.n_spheres + i);
    sc.boxes.push_back(b);
  }
  if (cfg.room) {
    BoxObj room;
    double rr = std::max(4.2, cfg.radius + 0.8);
    room.lo = {-rr, -std::max(2.8, 0.6 * rr), -rr};
    room.hi = {rr, std::max(3.2, 0.75 * rr), rr};
    room.tex.kind = TextureSpec::Kind::kNoise;
    room.tex.c0 = {0.18f, 0.2f, 0.24f};
    room.tex.c1 = {0.55f, 0.5f, 0.42f};
    room.tex.scale = float(0.7 * cfg.texture_scale);
    room.tex.seed = std::uint32_t(rng.below(1u << 30));
    sc.room = room;
  }

  // intrinsics: horizontal fov, pixel centers at integer coordinates
  sc.intr.width = cfg.width;
  sc.intr.height = cfg.height;
  double fov = cfg.fov_deg * kPi / 180.0;
  sc.intr.fx = 0.5 * cfg.width / std::tan(0.5 * fov);
  sc.intr.fy = sc.intr.fx;
  sc.intr.cx = 0.5 * (cfg.width - 1);
  sc.intr.cy = 0.5 * (cfg.height - 1);

  for (int i = 0; i < cfg.n_images; ++i) {
    double theta;
    if (cfg.layout == "orbit") {
      theta = 2.0 * kPi * double(i) / double(cfg.n_images);
    } else {
      double span = cfg.arc_deg * kPi / 180.0;
      double f = cfg.n_images > 1 ? double(i) / double(cfg.n_images - 1) : 0.5;
      theta = -0.5 * span + f * span;
    }
    geom::Vec3 eye(cfg.radius * std::sin(theta),
                   0.25 + rng.uniform(-0.2, 0.35),
                   cfg.radius * std::cos(theta));
    geom::Vec3 target(rng.uniform(-0.08, 0.08), rng.uniform(-0.08, 0.08),
                      rng.uniform(-0.08, 0.08));
    sc.cams.push_back(geom::look_at(eye, target, {0, 1, 0}));
  }

  // near/far from traced depth extremes on a coarse pixel grid
  double tmin = 1e300, tmax = 0;
  for (const auto& cam : sc.cams)
    for (int gy = 0; gy < 12; ++gy)
      for (int gx = 0; gx < 16; ++gx) {
        double u = double(gx) * (cfg.width - 1) / 15.0;
        double v = double(gy) * (cfg.height - 1) / 11.0;
        auto ray = geom::make_ray(cam, sc.intr, u, v);
        Hit h = trace(sc, ray.o, ray.d);
        if (h.valid) {
          tmin = std::min(tmin, h.t);
          tmax = std::max(tmax, h.t);
        }
      }
  if (tmax <= 0) {
    sc.near = 0.05 * cfg.radius;
    sc.far = 3.0 * cfg.radius;
  } else {
    sc.near = std::max(0.05, 0.8 * tmin);
    sc.far = 1.12 * tmax;
  }

  geom::Vec3 lo(1e300, 1e300, 1e300), hi(-1e300, -1e300, -1e300);
  auto grow = [&](const geom::Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  };
  for (const auto& cam : sc.cams) grow(cam.t);
  for (const auto& s : sc.spheres) {
    grow(s.center - geom::Vec3::Constant(s.radius));
    grow(s.center + geom::Vec3::Constant(s.radius));
  }
  for (const auto& b : sc.boxes) {
    grow(b.lo);
    grow(b.hi);
  }
  sc.diameter = (hi - lo).norm();
  return sc;
}

}  // namespace sanerf::data
