#include "posenet/posenet.h"

#include <cmath>

#include "core/common.h"

namespace sanerf::posenet {

PoseNet::PoseNet(PoseNetConfig cfg, std::string prefix)
    : cfg_(cfg), prefix_(std::move(prefix)) {
  SANERF_CHECK(cfg_.n_views == 3, "posenet: n_views must be 3");
  SANERF_CHECK(cfg_.base_channels >= 1 && cfg_.input_w >= 8 && cfg_.input_h >= 8,
               "posenet: bad config");
  if (cfg_.direct_pose)
    SANERF_CHECK(cfg_.n_images >= 1, "posenet: direct mode needs n_images");
  kernels_ = {7, 5, 3, 3, 3, 3, 3};
  for (int l = 0; l < 7; ++l)
    channels_.push_back(cfg_.base_channels * std::min(1 << l, 16));
}

std::vector<PoseNet::ParamSpec> PoseNet::param_specs() const {
  std::vector<ParamSpec> specs;
  if (cfg_.direct_pose) {
    for (int i = 0; i < cfg_.n_images; ++i) {
      std::string base = prefix_ + "p" + std::to_string(i) + ".";
      specs.push_back({base + "a", {1, 3}, 3, 3, true, 1.0});
      specs.push_back({base + "t", {1, 3}, 3, 3, true, 1.0});
    }
    return specs;
  }
  int cin = 3 * cfg_.n_views;
  for (int l = 0; l < 7; ++l) {
    const int k = kernels_[l], cout = channels_[l];
    specs.push_back({prefix_ + "w" + std::to_string(l),
                     {std::size_t(cout), std::size_t(k * k * cin)}, k * k * cin,
                     cout, false, 1.0});
    specs.push_back(
        {prefix_ + "b" + std::to_string(l), {1, std::size_t(cout)}, 0, 0, true, 1.0});
    cin = cout;
  }
  const int nout = 6 * (cfg_.n_views - 1);
  specs.push_back({prefix_ + "wh", {std::size_t(nout), std::size_t(cin)}, cin,
                   nout, false, cfg_.head_init_scale});
  specs.push_back({prefix_ + "bh", {1, std::size_t(nout)}, 0, 0, true, 1.0});
  return specs;
}

void PoseNet::init(ad::ParamStore<float>& store, Rng& rng) const {
  auto specs = param_specs();
  if (store.contains(specs.front().name)) {
    for (const auto& s : specs)
      SANERF_CHECK(store.contains(s.name) && store.at(s.name).shape == s.shape,
                   "posenet '", prefix_, "': stored params do not match config");
    return;
  }
  for (const auto& s : specs) {
    auto& e = store.create(s.name, s.shape);
    if (s.zero) continue;
    double lim = s.init_scale * std::sqrt(6.0 / double(s.fan_in + s.fan_out));
    for (auto& v : e.value) v = float(rng.uniform(-lim, lim));
  }
}

template <typename T>
std::pair<EulerPoseRefs<T>, EulerPoseRefs<T>> PoseNet::forward(
    ad::Graph<T>& g, const ad::ParamStore<T>& store, const data::Image& ref,
    const data::Image& img_i, const data::Image& img_j) const {
  SANERF_CHECK(!cfg_.direct_pose, "posenet: forward() is CNN-mode only");
  SANERF_CHECK(ref.width > 0 && ref.height > 0, "posenet: empty image");
  SANERF_CHECK(img_i.width == ref.width && img_i.height == ref.height &&
                   img_j.width == ref.width && img_j.height == ref.height,
               "posenet: triple images must share one size");

  int W = cfg_.input_w, H = cfg_.input_h;
  data::Image r = data::resize_bilinear(ref, W, H);
  data::Image a = data::resize_bilinear(img_i, W, H);
  data::Image b = data::resize_bilinear(img_j, W, H);

  // (H*W, 9): the triple concatenated along the color channels
  std::vector<T> in(std::size_t(H) * W * 9);
  for (std::size_t p = 0; p < std::size_t(H) * W; ++p)
    for (int c = 0; c < 3; ++c) {
      in[p * 9 + c] = T(r.pix[p * 3 + c]);
      in[p * 9 + 3 + c] = T(a.pix[p * 3 + c]);
      in[p * 9 + 6 + c] = T(b.pix[p * 3 + c]);
    }
  auto x = g.constant({std::size_t(H) * W, 9}, in);

  for (int l = 0; l < 7; ++l) {
    x = g.conv2d(x, store.leaf(g, prefix_ + "w" + std::to_string(l)), H, W,
                 kernels_[l], 2);
    x = g.add_rowvec(x, store.leaf(g, prefix_ + "b" + std::to_string(l)));
    x = g.relu(x);
    H = (H + 1) / 2;
    W = (W + 1) / 2;
  }
  x = g.conv2d(x, store.leaf(g, prefix_ + "wh"), H, W, 1, 1);
  x = g.add_rowvec(x, store.leaf(g, prefix_ + "bh"));
  auto pooled = g.gap(x);  // (1, 12)

  const T ts = T(cfg_.translation_scale);
  EulerPoseRefs<T> pi{g.slice_cols(pooled, 0, 3),
                      g.affine(g.slice_cols(pooled, 3, 6), ts, T(0))};
  EulerPoseRefs<T> pj{g.slice_cols(pooled, 6, 9),
                      g.affine(g.slice_cols(pooled, 9, 12), ts, T(0))};
  return {pi, pj};
}

template <typename T>
EulerPoseRefs<T> PoseNet::direct_pose(ad::Graph<T>& g,
                                      const ad::ParamStore<T>& store,
                                      int image_id) const {
  SANERF_CHECK(cfg_.direct_pose, "posenet: direct_pose() needs direct mode");
  SANERF_CHECK(0 <= image_id && image_id < cfg_.n_images,
               "posenet: bad image id ", image_id);
  std::string base = prefix_ + "p" + std::to_string(image_id) + ".";
  const T ts = T(cfg_.translation_scale);
  return {store.leaf(g, base + "a"),
          g.affine(store.leaf(g, base + "t"), ts, T(0))};
}

template <typename T>
PoseRefs<T> pose_nodes(ad::Graph<T>& g, const EulerPoseRefs<T>& e) {
  SANERF_SHAPE_CHECK((g.shape(e.angles) == ad::Shape{1, 3}) &&
                         (g.shape(e.trans) == ad::Shape{1, 3}),
                     "pose_nodes: angles/trans must be (1,3)");
  auto ax = g.slice_cols(e.angles, 0, 1);
  auto ay = g.slice_cols(e.angles, 1, 2);
  auto az = g.slice_cols(e.angles, 2, 3);
  geom::RotRefs<T> rot = geom::rotation_nodes(g, ax, ay, az);
  return {rot.R, rot.Rt, e.trans, false};
}

template <typename T>
PoseRefs<T> identity_pose(ad::Graph<T>& g) {
  static const std::vector<double> eye = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  std::vector<T> eyeT(eye.begin(), eye.end());
  auto R = g.constant({3, 3}, eyeT);
  auto t = g.constant({1, 3}, std::vector<T>{T(0), T(0), T(0)});
  return {R, R, t, true};
}

template <typename T>
std::map<int, PoseRefs<T>> poses_for_triple(ad::Graph<T>& g,
                                            const ad::ParamStore<T>& store,
                                            const PoseNet& net,
                                            const std::vector<data::Image>& images,
                                            int ref_id, int img_i, int img_j) {
  const int n = int(images.size());
  SANERF_CHECK(0 <= ref_id && ref_id < n && 0 <= img_i && img_i < n &&
                   0 <= img_j && img_j < n,
               "poses_for_triple: image id out of range");
  SANERF_CHECK(ref_id != img_i && ref_id != img_j && img_i != img_j,
               "poses_for_triple: ids must be distinct");

  std::map<int, PoseRefs<T>> out;
  out[ref_id] = identity_pose<T>(g);
  if (net.config().direct_pose) {
    out[img_i] = pose_nodes(g, net.direct_pose(g, store, img_i));
    out[img_j] = pose_nodes(g, net.direct_pose(g, store, img_j));
  } else {
    auto [ei, ej] =
        net.forward(g, store, images[ref_id], images[img_i], images[img_j]);
    out[img_i] = pose_nodes(g, ei);
    out[img_j] = pose_nodes(g, ej);
  }
  return out;
}

template std::pair<EulerPoseRefs<float>, EulerPoseRefs<float>> PoseNet::forward(
    ad::Graph<float>&, const ad::ParamStore<float>&, const data::Image&,
    const data::Image&, const data::Image&) const;
template std::pair<EulerPoseRefs<double>, EulerPoseRefs<double>>
PoseNet::forward(ad::Graph<double>&, const ad::ParamStore<double>&,
                 const data::Image&, const data::Image&,
                 const data::Image&) const;
template EulerPoseRefs<float> PoseNet::direct_pose(
    ad::Graph<float>&, const ad::ParamStore<float>&, int) const;
template EulerPoseRefs<double> PoseNet::direct_pose(
    ad::Graph<double>&, const ad::ParamStore<double>&, int) const;
template PoseRefs<float> pose_nodes(ad::Graph<float>&,
                                    const EulerPoseRefs<float>&);
template PoseRefs<double> pose_nodes(ad::Graph<double>&,
                                     const EulerPoseRefs<double>&);
template PoseRefs<float> identity_pose(ad::Graph<float>&);
template PoseRefs<double> identity_pose(ad::Graph<double>&);
template std::map<int, PoseRefs<float>> poses_for_triple(
    ad::Graph<float>&, const ad::ParamStore<float>&, const PoseNet&,
    const std::vector<data::Image>&, int, int, int);
template std::map<int, PoseRefs<double>> poses_for_triple(
    ad::Graph<double>&, const ad::ParamStore<double>&, const PoseNet&,
    const std::vector<data::Image>&, int, int, int);

}  // namespace sanerf::posenet
