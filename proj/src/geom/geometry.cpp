#include "geom/geometry.h"

#include <cmath>

namespace sanerf::geom {

Intrinsics downscale(const Intrinsics& k, int factor) {
  SANERF_CHECK(factor >= 1, "downscale factor must be >= 1");
  SANERF_CHECK(k.width % factor == 0 && k.height % factor == 0,
               "downscale: ", k.width, "x", k.height, " not divisible by ",
               factor);
  Intrinsics o = k;
  double f = double(factor);
  o.fx = k.fx / f;
  o.fy = k.fy / f;
  o.cx = k.cx / f;
  o.cy = k.cy / f;
  o.width = k.width / factor;
  o.height = k.height / factor;
  return o;
}

Mat3 euler_to_rot(double ax, double ay, double az) {
  Mat3 rx, ry, rz;
  double cx = std::cos(ax), sx = std::sin(ax);
  double cy = std::cos(ay), sy = std::sin(ay);
  double cz = std::cos(az), sz = std::sin(az);
  rx << 1, 0, 0, 0, cx, -sx, 0, sx, cx;
  ry << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
  rz << cz, -sz, 0, sz, cz, 0, 0, 0, 1;
  return rz * ry * rx;
}

Eigen::Vector3d rot_to_euler(const Mat3& R) {
  double sy = -R(2, 0);
  sy = std::clamp(sy, -1.0, 1.0);
  double ay = std::asin(sy);
  double ax, az;
  if (std::abs(sy) < 1.0 - 1e-9) {
    ax = std::atan2(R(2, 1), R(2, 2));
    az = std::atan2(R(1, 0), R(0, 0));
  } else {
    // gimbal lock: push all z-rotation into ax
    ax = std::atan2(-R(1, 2), R(1, 1));
    az = 0;
  }
  return {ax, ay, az};
}

Vec3 pixel_dir_cam(const Intrinsics& k, double u, double v) {
  Vec3 d((u - k.cx) / k.fx, -(v - k.cy) / k.fy, -1.0);
  return d.normalized();
}

Ray make_ray(const Pose& pose, const Intrinsics& k, double u, double v) {
  return {pose.t, pose.R * pixel_dir_cam(k, u, v)};
}

bool project(const Pose& pose, const Intrinsics& k, const Vec3& x, double& u,
             double& v) {
  Vec3 xc = pose.R.transpose() * (x - pose.t);
  if (xc.z() >= -1e-12) return false;
  double inv = 1.0 / -xc.z();
  u = k.cx + k.fx * xc.x() * inv;
  v = k.cy - k.fy * xc.y() * inv;
  return true;
}

Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  Vec3 zc = (eye - target).normalized();  // camera +z points away from target
  Vec3 xc = up.cross(zc).normalized();
  Vec3 yc = zc.cross(xc);
  Pose p;
  p.R.col(0) = xc;
  p.R.col(1) = yc;
  p.R.col(2) = zc;
  p.t = eye;
  return p;
}

Sim3 umeyama(const std::vector<Vec3>& src, const std::vector<Vec3>& dst) {
  SANERF_CHECK(src.size() == dst.size(), "umeyama: size mismatch ", src.size(),
               " vs ", dst.size());
  const std::size_t n = src.size();
  if (n < 3) throw DegenerateError(strcat_("umeyama: need >= 3 points, got ", n));

  Vec3 mu_s = Vec3::Zero(), mu_d = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mu_s += src[i];
    mu_d += dst[i];
  }
  mu_s /= double(n);
  mu_d /= double(n);

  Mat3 cov = Mat3::Zero();
  double var_s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 ds = src[i] - mu_s;
    cov += (dst[i] - mu_d) * ds.transpose();
    var_s += ds.squaredNorm();
  }
  cov /= double(n);
  var_s /= double(n);

  if (var_s <= 1e-24)
    throw DegenerateError("umeyama: source points are coincident");

  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec3 d = svd.singularValues();
  // rank < 2 (e.g. collinear points) leaves the rotation unconstrained;
  // singular values carry units of length^2, so compare against var_s
  if (d(1) <= 1e-12 * std::max(d(0), var_s))
    throw DegenerateError("umeyama: degenerate point configuration (rank < 2)");

  Mat3 S = Mat3::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0) S(2, 2) = -1;

  Sim3 out;
  out.R = svd.matrixU() * S * svd.matrixV().transpose();
  out.s = (d.asDiagonal() * S).trace() / var_s;
  out.t = mu_d - out.s * (out.R * mu_s);
  return out;
}

double ate_rmse(const std::vector<Pose>& est, const std::vector<Pose>& gt) {
  SANERF_CHECK(est.size() == gt.size(), "ate: size mismatch");
  std::vector<Vec3> src(est.size()), dst(gt.size());
  for (std::size_t i = 0; i < est.size(); ++i) {
    src[i] = est[i].t;
    dst[i] = gt[i].t;
  }
  Sim3 a = umeyama(src, dst);
  double se = 0;
  for (std::size_t i = 0; i < src.size(); ++i)
    se += (a.apply(src[i]) - dst[i]).squaredNorm();
  return std::sqrt(se / double(src.size()));
}

template <typename T>
RotRefs<T> rotation_nodes(ad::Graph<T>& g, typename ad::Graph<T>::Ref ax,
                          typename ad::Graph<T>::Ref ay,
                          typename ad::Graph<T>::Ref az) {
  using Ref = typename ad::Graph<T>::Ref;
  auto sx = g.sin(ax), cx = g.cos(ax);
  auto sy = g.sin(ay), cy = g.cos(ay);
  auto sz = g.sin(az), cz = g.cos(az);
  // R = Rz * Ry * Rx
  Ref r00 = g.mul(cz, cy);
  Ref r01 = g.sub(g.mul(g.mul(cz, sy), sx), g.mul(sz, cx));
  Ref r02 = g.add(g.mul(g.mul(cz, sy), cx), g.mul(sz, sx));
  Ref r10 = g.mul(sz, cy);
  Ref r11 = g.add(g.mul(g.mul(sz, sy), sx), g.mul(cz, cx));
  Ref r12 = g.sub(g.mul(g.mul(sz, sy), cx), g.mul(cz, sx));
  Ref r20 = g.neg(sy);
  Ref r21 = g.mul(cy, sx);
  Ref r22 = g.mul(cy, cx);
  auto row3 = [&](Ref a, Ref b, Ref c) {
    return g.concat_cols(g.concat_cols(a, b), c);
  };
  RotRefs<T> out;
  out.R = g.concat_rows(g.concat_rows(row3(r00, r01, r02), row3(r10, r11, r12)),
                        row3(r20, r21, r22));
  out.Rt = g.concat_rows(
      g.concat_rows(row3(r00, r10, r20), row3(r01, r11, r21)),
      row3(r02, r12, r22));
  return out;
}

template RotRefs<float> rotation_nodes(ad::Graph<float>&, int, int, int);
template RotRefs<double> rotation_nodes(ad::Graph<double>&, int, int, int);

}  // namespace sanerf::geom
