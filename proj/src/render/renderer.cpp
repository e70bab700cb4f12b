#include "render/renderer.h"

#include <algorithm>
#include <cmath>

namespace sanerf::render {

template <typename T>
FieldFn<T> field_fn(const field::Field& f, const ad::ParamStore<T>& store) {
  return [&f, &store](ad::Graph<T>& g, int pos, int dir) {
    return f.evaluate(g, store, pos, dir);
  };
}

template FieldFn<float> field_fn<float>(const field::Field&,
                                        const ad::ParamStore<float>&);
template FieldFn<double> field_fn<double>(const field::Field&,
                                          const ad::ParamStore<double>&);

template <typename T>
LevelOut<T> composite_level(ad::Graph<T>& g, const FieldFn<T>& fn, int origin,
                            int dirs, std::vector<SampleSet> sets) {
  const std::size_t n_rays = g.shape(dirs).rows;
  SANERF_SHAPE_CHECK(g.shape(dirs).cols == 3 && (g.shape(origin) == ad::Shape{1, 3}),
                     "composite_level: origin must be (1,3), dirs (N,3)");
  SANERF_CHECK(sets.size() == n_rays, "composite_level: ", sets.size(),
               " sample sets for ", n_rays, " rays");
  const std::size_t s = sets[0].t.size();
  SANERF_CHECK(s >= 1, "composite_level: empty sample set");

  std::vector<T> tvals, deltas;
  tvals.reserve(n_rays * s);
  deltas.reserve(n_rays * s);
  LevelOut<T> out;
  for (const auto& set : sets) {
    SANERF_SHAPE_CHECK(set.t.size() == s && set.delta.size() == s,
                       "composite_level: ragged sample sets");
    for (std::size_t i = 0; i < s; ++i) {
      SANERF_CHECK(set.delta[i] > 0, "composite_level: nonpositive delta");
      tvals.push_back(T(set.t[i]));
      deltas.push_back(T(set.delta[i]));
    }
    out.uniform_fallback |= set.uniform_fallback;
  }

  auto tc = g.constant({n_rays * s, 1}, tvals);
  auto dc = g.constant({n_rays * s, 1}, deltas);
  auto dir_rep = g.repeat_rows(dirs, int(s));
  out.positions = g.add_rowvec(g.mul_colvec(dir_rep, tc), origin);

  auto fo = fn(g, out.positions, dir_rep);
  SANERF_SHAPE_CHECK((g.shape(fo.sigma) == ad::Shape{n_rays * s, 1}) &&
                         (g.shape(fo.rgb) == ad::Shape{n_rays * s, 3}),
                     "composite_level: field output shapes");
  for (T v : g.val(fo.sigma))
    SANERF_CHECK(v >= T(0), "composite_level: negative density ", v);

  auto seg = g.mul(fo.sigma, dc);                      // sigma_i delta_i
  auto trans = g.exp(g.neg(g.cumsum_ex(seg, int(s)))); // T_i
  auto alpha = g.affine(g.exp(g.neg(seg)), T(-1), T(1));
  out.weights = g.mul(trans, alpha);
  out.color = g.seg_sum(g.mul_colvec(fo.rgb, out.weights), int(s));
  out.expected = g.seg_sum(g.mul_colvec(out.positions, out.weights), int(s));
  out.total_weight = g.seg_sum(out.weights, int(s));
  out.trans_far = g.exp(g.neg(g.seg_sum(seg, int(s))));
  out.samples = std::move(sets);
  return out;
}

template LevelOut<float> composite_level<float>(ad::Graph<float>&,
                                                const FieldFn<float>&, int,
                                                int, std::vector<SampleSet>);
template LevelOut<double> composite_level<double>(ad::Graph<double>&,
                                                  const FieldFn<double>&, int,
                                                  int, std::vector<SampleSet>);

template <typename T>
TwoLevelOut<T> render_rays(ad::Graph<T>& g, const FieldFn<T>& coarse_fn,
                           const FieldFn<T>& fine_fn, int origin, int dirs,
                           double t_near, double t_far, const RenderConfig& rc,
                           Rng& rng) {
  SANERF_CHECK(t_near < t_far, "render_rays: t_near ", t_near, " >= t_far ",
               t_far);
  const std::size_t n_rays = g.shape(dirs).rows;
  TwoLevelOut<T> out;

  std::vector<SampleSet> coarse_sets;
  coarse_sets.reserve(n_rays);
  for (std::size_t r = 0; r < n_rays; ++r)
    coarse_sets.push_back(stratified_samples(t_near, t_far, rc.n_coarse, rng,
                                             rc.jitter, rc.sentinel));
  out.coarse =
      composite_level(g, coarse_fn, origin, dirs, std::move(coarse_sets));

  const auto& w = g.val(out.coarse.weights);
  std::vector<SampleSet> fine_sets;
  fine_sets.reserve(n_rays);
  std::vector<double> wr(rc.n_coarse);
  for (std::size_t r = 0; r < n_rays; ++r) {
    for (int i = 0; i < rc.n_coarse; ++i)
      wr[i] = double(w[r * rc.n_coarse + i]);
    fine_sets.push_back(importance_samples(out.coarse.samples[r], wr, t_near,
                                           t_far, rc.n_fine, rng, rc.jitter,
                                           rc.sentinel));
  }
  out.fine = composite_level(g, fine_fn, origin, dirs, std::move(fine_sets));
  return out;
}

template TwoLevelOut<float> render_rays<float>(ad::Graph<float>&,
                                               const FieldFn<float>&,
                                               const FieldFn<float>&, int, int,
                                               double, double,
                                               const RenderConfig&, Rng&);
template TwoLevelOut<double> render_rays<double>(ad::Graph<double>&,
                                                 const FieldFn<double>&,
                                                 const FieldFn<double>&, int,
                                                 int, double, double,
                                                 const RenderConfig&, Rng&);

data::Image render_image(const FieldFn<float>& coarse_fn,
                         const FieldFn<float>& fine_fn, const geom::Pose& pose,
                         const geom::Intrinsics& intr, double t_near,
                         double t_far, const RenderConfig& rc, Rng& rng,
                         int batch_rays) {
  data::Image img(intr.width, intr.height);
  const int total = intr.width * intr.height;
  std::vector<float> o = {float(pose.t.x()), float(pose.t.y()),
                          float(pose.t.z())};
  for (int start = 0; start < total; start += batch_rays) {
    int count = std::min(batch_rays, total - start);
    std::vector<float> dirs;
    dirs.reserve(std::size_t(count) * 3);
    for (int k = 0; k < count; ++k) {
      int px = (start + k) % intr.width, py = (start + k) / intr.width;
      geom::Vec3 d = pose.R * geom::pixel_dir_cam(intr, px, py);
      dirs.insert(dirs.end(), {float(d.x()), float(d.y()), float(d.z())});
    }
    ad::Graph32 g;
    auto origin = g.constant({1, 3}, o);
    auto dn = g.constant({std::size_t(count), 3}, dirs);
    auto two =
        render_rays(g, coarse_fn, fine_fn, origin, dn, t_near, t_far, rc, rng);
    const auto& c = g.val(two.fine.color);
    for (int k = 0; k < count; ++k) {
      int px = (start + k) % intr.width, py = (start + k) / intr.width;
      for (int ch = 0; ch < 3; ++ch)
        img.at(px, py)[ch] = std::clamp(c[k * 3 + ch], 0.f, 1.f);
    }
  }
  return img;
}

}  // namespace sanerf::render
