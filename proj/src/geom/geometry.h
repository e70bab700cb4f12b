#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ad/graph.h"
#include "core/common.h"

namespace sanerf::geom {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Camera-to-world pose: R maps camera coordinates into world coordinates,
// t is the camera center. World ray through a pixel is o = t, d = R * d_cam.
struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();
};

struct Intrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;
};

Intrinsics downscale(const Intrinsics& k, int factor);

// intrinsic X-Y-Z Euler composition: R = Rz(az) * Ry(ay) * Rx(ax)
Mat3 euler_to_rot(double ax, double ay, double az);
// inverse of euler_to_rot away from the ay = +-pi/2 gimbal lock
Eigen::Vector3d rot_to_euler(const Mat3& R);

// camera looks down -z; +u right maps to +x, +v down maps to -y
Vec3 pixel_dir_cam(const Intrinsics& k, double u, double v);  // normalized

struct Ray {
  Vec3 o, d;
};
Ray make_ray(const Pose& pose, const Intrinsics& k, double u, double v);

// world point to pixel; false when the point is not strictly in front
bool project(const Pose& pose, const Intrinsics& k, const Vec3& x, double& u,
             double& v);

Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up);

// similarity transform dst ~= s * R * src + t
struct Sim3 {
  double s = 1;
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();
  Vec3 apply(const Vec3& x) const { return s * (R * x) + t; }
};

// least-squares Umeyama alignment; throws DegenerateError for n < 3 or
// (near-)collinear source points
Sim3 umeyama(const std::vector<Vec3>& src, const std::vector<Vec3>& dst);

// translation RMSE of camera centers after Sim(3) alignment est -> gt
double ate_rmse(const std::vector<Pose>& est, const std::vector<Pose>& gt);

// rotation matrix and its transpose assembled in-graph from three angle
// scalars, so pose gradients flow through sin/cos nodes
template <typename T>
struct RotRefs {
  typename ad::Graph<T>::Ref R, Rt;
};
template <typename T>
RotRefs<T> rotation_nodes(ad::Graph<T>& g, typename ad::Graph<T>::Ref ax,
                          typename ad::Graph<T>::Ref ay,
                          typename ad::Graph<T>::Ref az);

}  // namespace sanerf::geom
