#pragma once

#include <functional>
#include <vector>

#include "ad/graph.h"
#include "ad/params.h"
#include "core/rng.h"
#include "data/image.h"
#include "field/field.h"
#include "geom/geometry.h"
#include "render/sampling.h"

namespace sanerf::render {

struct RenderConfig {
  int n_coarse = 64;
  int n_fine = 64;   // importance samples added on top of the merged coarse t
  bool jitter = true;
  double sentinel = kSentinelDelta;
};

// Anything that maps graph nodes (positions (M,3), directions (M,3)) to field
// outputs. The usual case wraps an MLP; tests inject analytic fields built
// from the eagerly available position values.
template <typename T>
using FieldFn =
    std::function<field::FieldOut<T>(ad::Graph<T>&, int pos, int dir)>;

template <typename T>
FieldFn<T> field_fn(const field::Field& f, const ad::ParamStore<T>& store);

template <typename T>
struct LevelOut {
  int color = -1;         // (N,3)
  int weights = -1;       // (N*S,1)
  int expected = -1;      // (N,3): sum_i w_i (o + t_i d), not normalized
  int total_weight = -1;  // (N,1)
  int trans_far = -1;     // (N,1): transmittance past the last sample
  int positions = -1;     // (N*S,3)
  std::vector<SampleSet> samples;
  bool uniform_fallback = false;  // any ray fell back to the uniform PDF
};

// Discrete quadrature over fixed per-ray sample sets: s_i = sigma_i delta_i,
// T_i = exp(-sum_{j<i} s_j), w_i = T_i (1 - exp(-s_i)). Differentiable
// through origin (1,3), dirs (N,3) and the field. Host-checks sigma >= 0.
template <typename T>
LevelOut<T> composite_level(ad::Graph<T>& g, const FieldFn<T>& fn, int origin,
                            int dirs, std::vector<SampleSet> sets);

template <typename T>
struct TwoLevelOut {
  LevelOut<T> coarse, fine;
};

// coarse stratified pass, then a fine pass over coarse t-values merged with
// importance samples drawn from the coarse weights
template <typename T>
TwoLevelOut<T> render_rays(ad::Graph<T>& g, const FieldFn<T>& coarse_fn,
                           const FieldFn<T>& fine_fn, int origin, int dirs,
                           double t_near, double t_far, const RenderConfig& rc,
                           Rng& rng);

// forward-only full-frame render at a fixed pose (the evaluation path)
data::Image render_image(const FieldFn<float>& coarse_fn,
                         const FieldFn<float>& fine_fn, const geom::Pose& pose,
                         const geom::Intrinsics& intr, double t_near,
                         double t_far, const RenderConfig& rc, Rng& rng,
                         int batch_rays = 2048);

}  // namespace sanerf::render
