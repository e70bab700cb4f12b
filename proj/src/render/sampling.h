#pragma once

#include <vector>

#include "core/rng.h"

namespace sanerf::render {

// t-values along one ray plus the quadrature gaps. The last gap is a large
// sentinel so a final opaque sample can absorb all remaining transmittance.
struct SampleSet {
  std::vector<double> t;      // strictly increasing, inside [t_near, t_far]
  std::vector<double> delta;  // delta[i] = t[i+1]-t[i]; delta.back() = sentinel
  bool uniform_fallback = false;
};

constexpr double kSentinelDelta = 1e10;

// one jittered sample per equal bin of [t_near, t_far]; with jitter off the
// samples sit at the bin centers
SampleSet stratified_samples(double t_near, double t_far, int n, Rng& rng,
                             bool jitter = true,
                             double sentinel = kSentinelDelta);

// Inverse-CDF draws from the piecewise-constant PDF proportional to the
// coarse per-sample weights. Bin edges are the midpoints between consecutive
// coarse t-values, extended to [t_near, t_far]. The n new samples are merged
// and sorted with the coarse ones. When the weights sum to ~0 the PDF falls
// back to uniform and the result is flagged.
SampleSet importance_samples(const SampleSet& coarse,
                             const std::vector<double>& weights, double t_near,
                             double t_far, int n, Rng& rng, bool jitter = true,
                             double sentinel = kSentinelDelta);

}  // namespace sanerf::render
