#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "geom/geometry.h"
#include "geom/posefile.h"

using namespace sanerf;
using geom::Mat3;
using geom::Pose;
using geom::Vec3;

namespace {
constexpr double kPi = std::numbers::pi;

std::mt19937& rng() {
  static std::mt19937 r(1234);
  return r;
}
double urand(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}
Vec3 vrand(double lo, double hi) {
  return {urand(lo, hi), urand(lo, hi), urand(lo, hi)};
}
}  // namespace

TEST_CASE("euler rotation matches hand-computed axis rotations") {
  CHECK(geom::euler_to_rot(0, 0, 0).isApprox(Mat3::Identity(), 1e-15));

  Mat3 rx90;
  rx90 << 1, 0, 0, 0, 0, -1, 0, 1, 0;
  CHECK(geom::euler_to_rot(kPi / 2, 0, 0).isApprox(rx90, 1e-14));

  Mat3 ry90;
  ry90 << 0, 0, 1, 0, 1, 0, -1, 0, 0;
  CHECK(geom::euler_to_rot(0, kPi / 2, 0).isApprox(ry90, 1e-14));

  Mat3 rz90;
  rz90 << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK(geom::euler_to_rot(0, 0, kPi / 2).isApprox(rz90, 1e-14));

  // composition order: Rz * Ry * Rx applied to +x
  Vec3 x = geom::euler_to_rot(0.3, 0.5, 0.7) * Vec3(1, 0, 0);
  Mat3 ry, rz;
  double cy = std::cos(0.5), sy = std::sin(0.5), cz = std::cos(0.7),
         sz = std::sin(0.7);
  ry << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
  rz << cz, -sz, 0, sz, cz, 0, 0, 0, 1;
  CHECK(x.isApprox(rz * (ry * Vec3(1, 0, 0)), 1e-14));
}

TEST_CASE("euler round trip and orthonormality") {
  for (int i = 0; i < 200; ++i) {
    double ax = urand(-kPi, kPi), ay = urand(-1.4, 1.4), az = urand(-kPi, kPi);
    Mat3 r = geom::euler_to_rot(ax, ay, az);
    CHECK((r * r.transpose() - Mat3::Identity()).norm() < 1e-13);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    Vec3 e = geom::rot_to_euler(r);
    CHECK((geom::euler_to_rot(e(0), e(1), e(2)) - r).norm() < 1e-12);
  }
}

TEST_CASE("pixel ray directions follow the camera convention") {
  geom::Intrinsics k{100, 100, 32, 24, 64, 48};
  // optical axis
  Vec3 c = geom::pixel_dir_cam(k, 32, 24);
  CHECK(c.isApprox(Vec3(0, 0, -1), 1e-14));
  // right of center -> +x, below center -> -y, always unit length
  CHECK(geom::pixel_dir_cam(k, 40, 24).x() > 0);
  CHECK(geom::pixel_dir_cam(k, 32, 30).y() < 0);
  CHECK(geom::pixel_dir_cam(k, 7, 41).norm() == doctest::Approx(1.0));

  // world ray applies pose rotation to the direction and starts at the center
  Pose p;
  p.R = geom::euler_to_rot(0.2, -0.4, 0.9);
  p.t = Vec3(1, 2, 3);
  auto ray = geom::make_ray(p, k, 10, 20);
  CHECK(ray.o.isApprox(p.t, 1e-15));
  CHECK(ray.d.isApprox(p.R * geom::pixel_dir_cam(k, 10, 20), 1e-14));
}

TEST_CASE("projection inverts the pixel ray") {
  geom::Intrinsics k{120, 110, 31.5, 23.5, 64, 48};
  for (int i = 0; i < 100; ++i) {
    Pose p;
    p.R = geom::euler_to_rot(urand(-1, 1), urand(-1, 1), urand(-1, 1));
    p.t = vrand(-3, 3);
    double u = urand(0, 63), v = urand(0, 47), depth = urand(0.5, 9.0);
    auto ray = geom::make_ray(p, k, u, v);
    double u2, v2;
    REQUIRE(geom::project(p, k, ray.o + depth * ray.d, u2, v2));
    CHECK(u2 == doctest::Approx(u).epsilon(1e-10));
    CHECK(v2 == doctest::Approx(v).epsilon(1e-10));
  }
  // points behind the camera are rejected
  Pose id;
  double u, v;
  CHECK_FALSE(geom::project(id, k, Vec3(0, 0, 1.0), u, v));
}

TEST_CASE("look_at aims the optical axis and keeps roll aligned with up") {
  Vec3 eye(2, 1, 5), target(0, 0, 0);
  Pose p = geom::look_at(eye, target, Vec3(0, 1, 0));
  // -z column points from eye toward target
  CHECK((-p.R.col(2)).isApprox((target - eye).normalized(), 1e-14));
  CHECK(p.t.isApprox(eye, 1e-15));
  CHECK((p.R * p.R.transpose() - Mat3::Identity()).norm() < 1e-14);
  CHECK(p.R.determinant() == doctest::Approx(1.0));
  CHECK(p.R.col(1).dot(Vec3(0, 1, 0)) > 0);  // y stays upward
  // the target projects to the principal point
  geom::Intrinsics k{80, 80, 16, 12, 32, 24};
  double u, v;
  REQUIRE(geom::project(p, k, target, u, v));
  CHECK(u == doctest::Approx(16).epsilon(1e-12));
  CHECK(v == doctest::Approx(12).epsilon(1e-12));
}

TEST_CASE("umeyama recovers a constructed similarity transform") {
  for (int trial = 0; trial < 50; ++trial) {
    geom::Sim3 gt;
    gt.s = urand(0.2, 4.0);
    gt.R = geom::euler_to_rot(urand(-kPi, kPi), urand(-1.4, 1.4), urand(-kPi, kPi));
    gt.t = vrand(-5, 5);
    std::vector<Vec3> src, dst;
    int n = 3 + trial % 20;
    for (int i = 0; i < n; ++i) {
      src.push_back(vrand(-2, 2));
      dst.push_back(gt.apply(src.back()));
    }
    // skip accidentally degenerate draws (nearly collinear triples)
    geom::Sim3 est;
    try {
      est = geom::umeyama(src, dst);
    } catch (const DegenerateError&) {
      continue;
    }
    CHECK(std::abs(est.s - gt.s) < 1e-9 * gt.s);
    CHECK((est.R - gt.R).norm() < 1e-9);
    CHECK((est.t - gt.t).norm() < 1e-9);
  }
}

TEST_CASE("umeyama rejects degenerate configurations") {
  std::vector<Vec3> two{{0, 0, 0}, {1, 0, 0}};
  CHECK_THROWS_AS(geom::umeyama(two, two), DegenerateError);

  std::vector<Vec3> line, img;
  for (int i = 0; i < 8; ++i) {
    line.push_back(Vec3(0.5 * i, 1.0 * i, -0.25 * i));
    img.push_back(Vec3(1, 2, 3) + Vec3(0.5 * i, 1.0 * i, -0.25 * i));
  }
  CHECK_THROWS_AS(geom::umeyama(line, img), DegenerateError);

  std::vector<Vec3> same(5, Vec3(1, 1, 1));
  CHECK_THROWS_AS(geom::umeyama(same, same), DegenerateError);
}

TEST_CASE("ate is zero under exact similarity and invariant to Sim3 on estimates") {
  std::vector<Pose> gt(12), est(12);
  for (auto& p : gt) {
    p.R = geom::euler_to_rot(urand(-1, 1), urand(-1, 1), urand(-1, 1));
    p.t = vrand(-4, 4);
  }
  geom::Sim3 warp;
  warp.s = 2.3;
  warp.R = geom::euler_to_rot(0.4, -0.2, 1.1);
  warp.t = Vec3(10, -3, 0.5);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    est[i].R = warp.R * gt[i].R;
    est[i].t = warp.apply(gt[i].t);
  }
  CHECK(geom::ate_rmse(est, gt) < 1e-9);

  // perturb, then verify a further Sim3 on the estimates leaves ATE unchanged
  for (auto& p : est) p.t += vrand(-0.05, 0.05);
  double a0 = geom::ate_rmse(est, gt);
  geom::Sim3 warp2;
  warp2.s = 0.71;
  warp2.R = geom::euler_to_rot(-0.9, 0.3, 0.2);
  warp2.t = Vec3(-4, 2, 7);
  std::vector<Pose> est2 = est;
  for (auto& p : est2) {
    p.R = warp2.R * p.R;
    p.t = warp2.apply(p.t);
  }
  CHECK(geom::ate_rmse(est2, gt) == doctest::Approx(a0).epsilon(1e-9));
}

TEST_CASE("ate alignment is a local minimum over perturbed similarities") {
  std::vector<Pose> gt(15), est(15);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    gt[i].t = vrand(-3, 3);
    est[i].t = gt[i].t + vrand(-0.1, 0.1);
  }
  std::vector<Vec3> src(est.size()), dst(gt.size());
  for (std::size_t i = 0; i < est.size(); ++i) {
    src[i] = est[i].t;
    dst[i] = gt[i].t;
  }
  geom::Sim3 opt = geom::umeyama(src, dst);
  auto rmse_of = [&](const geom::Sim3& a) {
    double se = 0;
    for (std::size_t i = 0; i < src.size(); ++i)
      se += (a.apply(src[i]) - dst[i]).squaredNorm();
    return std::sqrt(se / double(src.size()));
  };
  double best = rmse_of(opt);
  CHECK(geom::ate_rmse(est, gt) == doctest::Approx(best).epsilon(1e-12));
  for (int i = 0; i < 300; ++i) {
    geom::Sim3 p = opt;
    p.s *= 1.0 + urand(-0.02, 0.02);
    p.R = geom::euler_to_rot(urand(-0.02, 0.02), urand(-0.02, 0.02),
                             urand(-0.02, 0.02)) *
          p.R;
    p.t += vrand(-0.02, 0.02);
    CHECK(rmse_of(p) >= best - 1e-12);
  }
}

TEST_CASE("ate of isotropic noise matches the dof-corrected expectation") {
  // aligning 7 dof against n points leaves E[ate^2] ~= sigma^2 (3n-7)/n
  const int n = 60;
  const double sigma = 0.01;
  std::normal_distribution<double> gauss(0.0, sigma);
  double mean_sq = 0;
  const int seeds = 40;
  for (int s = 0; s < seeds; ++s) {
    std::vector<Pose> gt(n), est(n);
    for (int i = 0; i < n; ++i) {
      gt[i].t = vrand(-2, 2);
      est[i].t = gt[i].t + Vec3(gauss(rng()), gauss(rng()), gauss(rng()));
    }
    double a = geom::ate_rmse(est, gt);
    mean_sq += a * a / seeds;
  }
  double expected = sigma * sigma * (3.0 * n - 7) / n;
  CHECK(mean_sq > 0.8 * expected);
  CHECK(mean_sq < 1.2 * expected);
}

TEST_CASE("graph rotation nodes reproduce euler_to_rot and pass fd checks") {
  for (int i = 0; i < 20; ++i) {
    double ax = urand(-kPi, kPi), ay = urand(-1.4, 1.4), az = urand(-kPi, kPi);
    ad::Graph<double> g;
    auto rax = g.param("ax", {1, 1}, &ax);
    auto ray_ = g.param("ay", {1, 1}, &ay);
    auto raz = g.param("az", {1, 1}, &az);
    auto rot = geom::rotation_nodes(g, rax, ray_, raz);
    Mat3 want = geom::euler_to_rot(ax, ay, az);
    const auto& rv = g.val(rot.R);
    const auto& rtv = g.val(rot.Rt);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        CHECK(rv[r * 3 + c] == doctest::Approx(want(r, c)).epsilon(1e-12));
        CHECK(rtv[r * 3 + c] == doctest::Approx(want(c, r)).epsilon(1e-12));
      }
  }

  // rotate a bundle of directions and fd-check the angle gradients
  double ang[3] = {0.31, -0.55, 0.87};
  std::vector<double> dirs(5 * 3);
  for (auto& d : dirs) d = urand(-1, 1);
  std::vector<double> w(5 * 3);
  for (auto& x : w) x = urand(0.5, 1.5);
  auto loss_at = [&](const double* a) {
    ad::Graph<double> g;
    auto rot = geom::rotation_nodes(g, g.param("ax", {1, 1}, a),
                                    g.param("ay", {1, 1}, a + 1),
                                    g.param("az", {1, 1}, a + 2));
    auto world = g.matmul(g.constant({5, 3}, dirs), rot.Rt);
    return g.val(g.sum(g.mul(world, g.constant({5, 3}, w))))[0];
  };
  ad::Graph<double> g;
  auto rax = g.param("ax", {1, 1}, ang);
  auto ray2 = g.param("ay", {1, 1}, ang + 1);
  auto raz = g.param("az", {1, 1}, ang + 2);
  auto rot = geom::rotation_nodes(g, rax, ray2, raz);
  auto world = g.matmul(g.constant({5, 3}, dirs), rot.Rt);
  g.backward(g.sum(g.mul(world, g.constant({5, 3}, w))));
  const double h = 1e-6;
  ad::Graph<double>::Ref refs[3] = {rax, ray2, raz};
  for (int k = 0; k < 3; ++k) {
    double save = ang[k];
    double ap[3] = {ang[0], ang[1], ang[2]}, am[3] = {ang[0], ang[1], ang[2]};
    ap[k] += h;
    am[k] -= h;
    double fd = (loss_at(ap) - loss_at(am)) / (2 * h);
    ang[k] = save;
    REQUIRE(g.grad(refs[k]) != nullptr);
    double an = (*g.grad(refs[k]))[0];
    CHECK(std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-9}) < 1e-6);
  }
}

TEST_CASE("pose files round trip exactly and skip comments") {
  std::vector<Pose> poses(7);
  for (auto& p : poses) {
    p.R = geom::euler_to_rot(urand(-kPi, kPi), urand(-1.4, 1.4), urand(-kPi, kPi));
    p.t = vrand(-100, 100);
  }
  const std::string path = "/tmp/sanerf_poses_test.txt";
  geom::save_poses(path, poses, "unit-test poses");
  auto loaded = geom::load_poses(path);
  REQUIRE(loaded.size() == poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    CHECK((loaded[i].R - poses[i].R).norm() == 0.0);  // %.17g is lossless
    CHECK((loaded[i].t - poses[i].t).norm() == 0.0);
  }
  CHECK_THROWS_AS(geom::load_poses("/tmp/sanerf_missing_poses.txt"), IoError);
}

TEST_CASE("intrinsics downscale divides focal lengths and centers") {
  geom::Intrinsics k{400, 380, 160, 120, 320, 240};
  auto d = geom::downscale(k, 4);
  CHECK(d.fx == doctest::Approx(100));
  CHECK(d.fy == doctest::Approx(95));
  CHECK(d.cx == doctest::Approx(40));
  CHECK(d.cy == doctest::Approx(30));
  CHECK(d.width == 80);
  CHECK(d.height == 60);
  CHECK_THROWS_AS(geom::downscale(k, 7), Error);
}
