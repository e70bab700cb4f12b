#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/rng.h"
#include "data/image.h"
#include "data/texture.h"
#include "geom/geometry.h"

namespace sanerf::data {

struct SphereObj {
  geom::Vec3 center;
  double radius = 1;
  TextureSpec tex;
};

struct BoxObj {
  geom::Vec3 lo, hi;  // axis-aligned
  TextureSpec tex;
};

// Synthetic desk-scale scene: textured primitives around the origin, an
// optional enclosing room box (hit from the inside), and a camera rig.
// Everything is analytic, so the tracer below doubles as the ground-truth
// oracle for rendering, depth, visibility and correspondences.
struct SceneDesc {
  std::vector<SphereObj> spheres;
  std::vector<BoxObj> boxes;
  std::optional<BoxObj> room;
  geom::Intrinsics intr;
  std::vector<geom::Pose> cams;  // ground-truth camera-to-world
  double near = 0.1, far = 10.0;
  double diameter = 1.0;  // bbox diagonal of cameras + objects (room excluded)
  std::uint64_t seed = 0;
};

struct Hit {
  bool valid = false;
  double t = 0;  // distance along the (unit) ray direction
  geom::Vec3 point = geom::Vec3::Zero();
  geom::Vec3 normal = geom::Vec3::Zero();
  Eigen::Vector3f color = Eigen::Vector3f::Zero();
  int obj_id = -1;  // spheres, then boxes, then room
};

Hit trace(const SceneDesc& sc, const geom::Vec3& o, const geom::Vec3& d,
          double tmin = 1e-9);

Image render_scene(const SceneDesc& sc, const geom::Pose& cam,
                   const geom::Intrinsics& k);

// true when `point` (assumed on a surface) is the first thing the camera sees
// along the ray toward it
bool visible(const SceneDesc& sc, const geom::Vec3& point, const geom::Pose& cam);

struct GtPoint {
  int id = 0;
  geom::Vec3 xyz = geom::Vec3::Zero();
};

// deterministic area-weighted surface samples on the objects (room excluded)
std::vector<GtPoint> sample_surface_points(const SceneDesc& sc, int count,
                                           std::uint64_t seed);

// ground-truth correspondence for an image pair: both projections inside the
// frame (margin px) and the point unoccluded from both cameras
struct OracleMatch {
  int id = 0;
  double ui = 0, vi = 0, uj = 0, vj = 0;
};
std::vector<OracleMatch> oracle_matches(const SceneDesc& sc,
                                        const std::vector<GtPoint>& pts,
                                        int cam_i, int cam_j,
                                        double margin = 1.0);

struct GenConfig {
  std::uint64_t seed = 1;
  int n_images = 8;
  int width = 64, height = 48;
  double fov_deg = 50.0;
  int n_spheres = 5, n_boxes = 3;
  bool room = true;
  std::string layout = "arc";  // "arc" (forward-facing) or "orbit"
  double arc_deg = 48.0;       // total yaw span of the arc rig
  double radius = 3.6;         // rig distance from the origin
  int gt_points = 800;
  double texture_scale = 1.0;  // multiplies every texture frequency
};

SceneDesc generate_scene(const GenConfig& cfg);

}  // namespace sanerf::data
