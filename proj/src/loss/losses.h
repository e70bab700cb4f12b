#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ad/graph.h"
#include "data/image.h"
#include "match/matching.h"

namespace sanerf::loss {

struct LossWeights {
  double alpha = 1.0, beta = 1.0;
};

// Per-step numbers for the log. pr = pixel + feat_color; total combines the
// parts with the configured weights.
struct LossReport {
  double pixel = 0, feat_color = 0, pr = 0, l3d = 0, total = 0;
  double gated_fraction = 0;  // matches dropped by the total-weight gate
  int matches_total = 0, matches_used = 0;
  bool no_features = false;  // no feature-ray observations this step
  bool no_matches = false;   // every match was gated out (or none given)
};

// element-mean squared error between a rendered (N,3) batch and truth
template <typename T>
int photometric_loss(ad::Graph<T>& g, int rendered, int truth);

// bilinear fetch; sets *clamped when uv falls outside [0,W-1]x[0,H-1]
Eigen::Vector3f bilinear_sample(const data::Image& img, double u, double v,
                                bool* clamped = nullptr);

// mean over rows of the squared row norm (feature color reconstruction)
template <typename T>
int feature_color_loss(ad::Graph<T>& g, int rendered, int truth);

// The feature-ray observations of one triple: 3m rays ordered all-ref,
// all-i, all-j, with bilinear ground-truth colors per ray.
struct FeatureRays {
  int m = 0;  // matches
  std::vector<double> u, v;  // 3m pixel coordinates
  std::vector<float> truth;  // (3m, 3) row-major
  bool any_clamped = false;
};
FeatureRays feature_rays(const match::MatchTriple& triple,
                         const data::Image& ref_img, const data::Image& img_i,
                         const data::Image& img_j);

// Match-consistency loss over expected points. x* are (M,3) nodes, w* the
// matching (M,1) total weights; a match survives only when all three of its
// rays carry at least min_weight. loss is -1 when nothing survives.
template <typename T>
struct Gated {
  int loss = -1;
  int survivors = 0, total = 0;
  double gated_fraction() const {
    return total == 0 ? 0.0 : double(total - survivors) / double(total);
  }
};
template <typename T>
Gated<T> match_consistency_loss(ad::Graph<T>& g, int xr, int xi, int xj,
                                int wr, int wi, int wj,
                                double min_weight = 0.5);

// total = alpha * (pixel + feature) + beta * l3d; feature may be -1 when the
// step had no feature observations
template <typename T>
struct TotalRefs {
  int total = -1;
  LossReport report;
};
template <typename T>
TotalRefs<T> total_loss(ad::Graph<T>& g, int pixel, int feature,
                        const Gated<T>& l3d, const LossWeights& w);

}  // namespace sanerf::loss
