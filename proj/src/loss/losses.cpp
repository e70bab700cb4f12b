#include "loss/losses.h"

#include <cmath>

#include "core/common.h"

namespace sanerf::loss {

template <typename T>
int photometric_loss(ad::Graph<T>& g, int rendered, int truth) {
  SANERF_SHAPE_CHECK(g.shape(rendered) == g.shape(truth),
                     "photometric_loss: shape mismatch");
  SANERF_SHAPE_CHECK(g.shape(rendered).numel() > 0,
                     "photometric_loss: empty batch");
  auto d = g.sub(rendered, truth);
  return g.affine(g.sum(g.mul(d, d)), T(1.0 / double(g.shape(rendered).numel())),
                  T(0));
}

Eigen::Vector3f bilinear_sample(const data::Image& img, double u, double v,
                                bool* clamped) {
  if (clamped)
    *clamped = u < 0 || v < 0 || u > img.width - 1 || v > img.height - 1;
  return data::bilinear(img, u, v);
}

template <typename T>
int feature_color_loss(ad::Graph<T>& g, int rendered, int truth) {
  SANERF_SHAPE_CHECK(g.shape(rendered) == g.shape(truth),
                     "feature_color_loss: shape mismatch");
  SANERF_SHAPE_CHECK(g.shape(rendered).rows > 0,
                     "feature_color_loss: empty batch");
  auto d = g.sub(rendered, truth);
  return g.affine(g.sum(g.mul(d, d)), T(1.0 / double(g.shape(rendered).rows)),
                  T(0));
}

FeatureRays feature_rays(const match::MatchTriple& triple,
                         const data::Image& ref_img, const data::Image& img_i,
                         const data::Image& img_j) {
  FeatureRays out;
  out.m = int(triple.matches.size());
  out.u.reserve(3 * out.m);
  out.v.reserve(3 * out.m);
  out.truth.reserve(std::size_t(3) * out.m * 3);
  auto push = [&](const data::Image& img, double u, double v) {
    bool clamped = false;
    Eigen::Vector3f c = bilinear_sample(img, u, v, &clamped);
    out.any_clamped = out.any_clamped || clamped;
    out.u.push_back(u);
    out.v.push_back(v);
    out.truth.push_back(c[0]);
    out.truth.push_back(c[1]);
    out.truth.push_back(c[2]);
  };
  for (const auto& o : triple.matches) push(ref_img, o.ur, o.vr);
  for (const auto& o : triple.matches) push(img_i, o.ui, o.vi);
  for (const auto& o : triple.matches) push(img_j, o.uj, o.vj);
  return out;
}

template <typename T>
Gated<T> match_consistency_loss(ad::Graph<T>& g, int xr, int xi, int xj,
                                int wr, int wi, int wj, double min_weight) {
  const std::size_t m = g.shape(xr).rows;
  SANERF_SHAPE_CHECK(g.shape(xr).cols == 3 &&
                         g.shape(xi) == g.shape(xr) &&
                         g.shape(xj) == g.shape(xr),
                     "match_consistency_loss: points must be equal (M,3)");
  SANERF_SHAPE_CHECK((g.shape(wr) == ad::Shape{m, 1}) &&
                         (g.shape(wi) == ad::Shape{m, 1}) &&
                         (g.shape(wj) == ad::Shape{m, 1}),
                     "match_consistency_loss: weights must be (M,1)");
  Gated<T> out;
  out.total = int(m);
  if (m == 0) return out;

  // the gate is a detached host-side decision: degenerate rays neither
  // contribute to the loss nor receive gradients through it
  std::vector<T> mask(m, T(0));
  for (std::size_t k = 0; k < m; ++k) {
    bool ok = double(g.val(wr)[k]) >= min_weight &&
              double(g.val(wi)[k]) >= min_weight &&
              double(g.val(wj)[k]) >= min_weight;
    if (ok) {
      mask[k] = T(1);
      ++out.survivors;
    }
  }
  if (out.survivors == 0) return out;

  auto d2 = [&](int a, int b) {
    auto d = g.sub(a, b);
    return g.row_sum(g.mul(d, d));  // (M,1)
  };
  auto per_match = g.add(g.add(d2(xr, xi), d2(xr, xj)), d2(xi, xj));
  auto gated = g.mul(per_match, g.constant({m, 1}, mask));
  out.loss = g.affine(g.sum(gated), T(1.0 / double(out.survivors)), T(0));
  return out;
}

template <typename T>
TotalRefs<T> total_loss(ad::Graph<T>& g, int pixel, int feature,
                        const Gated<T>& l3d, const LossWeights& w) {
  SANERF_CHECK(w.alpha >= 0 && w.beta >= 0, "total_loss: weights must be >= 0");
  TotalRefs<T> out;
  out.report.pixel = double(g.val(pixel)[0]);
  out.report.no_features = feature < 0;
  out.report.feat_color = feature < 0 ? 0.0 : double(g.val(feature)[0]);
  out.report.pr = out.report.pixel + out.report.feat_color;
  out.report.no_matches = l3d.loss < 0;
  out.report.l3d = l3d.loss < 0 ? 0.0 : double(g.val(l3d.loss)[0]);
  out.report.gated_fraction = l3d.gated_fraction();
  out.report.matches_total = l3d.total;
  out.report.matches_used = l3d.survivors;

  int pr = feature < 0 ? pixel : g.add(pixel, feature);
  out.total = g.affine(pr, T(w.alpha), T(0));
  if (l3d.loss >= 0)
    out.total = g.add(out.total, g.affine(l3d.loss, T(w.beta), T(0)));
  out.report.total = double(g.val(out.total)[0]);
  return out;
}

template int photometric_loss(ad::Graph<float>&, int, int);
template int photometric_loss(ad::Graph<double>&, int, int);
template int feature_color_loss(ad::Graph<float>&, int, int);
template int feature_color_loss(ad::Graph<double>&, int, int);
template Gated<float> match_consistency_loss(ad::Graph<float>&, int, int, int,
                                             int, int, int, double);
template Gated<double> match_consistency_loss(ad::Graph<double>&, int, int,
                                              int, int, int, int, double);
template TotalRefs<float> total_loss(ad::Graph<float>&, int, int,
                                     const Gated<float>&, const LossWeights&);
template TotalRefs<double> total_loss(ad::Graph<double>&, int, int,
                                      const Gated<double>&, const LossWeights&);

}  // namespace sanerf::loss
