#include "render/sampling.h"

#include <algorithm>
#include <cmath>

#include "core/common.h"

namespace sanerf::render {
namespace {

void fill_deltas(SampleSet& s, double sentinel) {
  s.delta.resize(s.t.size());
  for (std::size_t i = 0; i + 1 < s.t.size(); ++i)
    s.delta[i] = s.t[i + 1] - s.t[i];
  s.delta.back() = sentinel;
}

// merged sample lists can collide when the PDF is spiky; keep the count and
// the order by pushing collisions forward by a hair
void enforce_increasing(std::vector<double>& t, double span) {
  const double gap = 1e-9 * span;
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i] <= t[i - 1] + gap) t[i] = t[i - 1] + gap;
}

}  // namespace

SampleSet stratified_samples(double t_near, double t_far, int n, Rng& rng,
                             bool jitter, double sentinel) {
  SANERF_CHECK(n >= 2, "stratified_samples: need n >= 2, got ", n);
  SANERF_CHECK(t_far > t_near, "stratified_samples: t_near ", t_near,
               " >= t_far ", t_far);
  SampleSet out;
  out.t.resize(n);
  const double bin = (t_far - t_near) / n;
  for (int i = 0; i < n; ++i)
    out.t[i] = t_near + (i + (jitter ? rng.uniform() : 0.5)) * bin;
  fill_deltas(out, sentinel);
  return out;
}

SampleSet importance_samples(const SampleSet& coarse,
                             const std::vector<double>& weights, double t_near,
                             double t_far, int n, Rng& rng, bool jitter,
                             double sentinel) {
  const std::size_t s = coarse.t.size();
  SANERF_CHECK(s >= 2, "importance_samples: need >= 2 coarse samples");
  SANERF_SHAPE_CHECK(weights.size() == s, "importance_samples: ",
                     weights.size(), " weights for ", s, " samples");
  SANERF_CHECK(t_far > t_near, "importance_samples: bad interval");

  SampleSet out;
  out.t.reserve(s + n);

  // bin i = [edge[i], edge[i+1]) carries mass weights[i]
  std::vector<double> edges(s + 1);
  edges[0] = t_near;
  for (std::size_t i = 1; i < s; ++i)
    edges[i] = 0.5 * (coarse.t[i - 1] + coarse.t[i]);
  edges[s] = t_far;

  std::vector<double> cum(s);
  double total = 0;
  for (std::size_t i = 0; i < s; ++i) {
    total += std::max(0.0, weights[i]);
    cum[i] = total;
  }

  if (total <= 1e-12) {
    out.uniform_fallback = true;
    for (int j = 0; j < n; ++j) {
      double u = (j + (jitter ? rng.uniform() : 0.5)) / n;
      out.t.push_back(t_near + u * (t_far - t_near));
    }
  } else {
    for (int j = 0; j < n; ++j) {
      double u = (j + (jitter ? rng.uniform() : 0.5)) / n * total;
      std::size_t k = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
      if (k >= s) k = s - 1;
      double lo = k == 0 ? 0.0 : cum[k - 1];
      double mass = cum[k] - lo;
      double frac = mass > 0 ? (u - lo) / mass : 0.5;
      out.t.push_back(edges[k] + frac * (edges[k + 1] - edges[k]));
    }
  }

  out.t.insert(out.t.end(), coarse.t.begin(), coarse.t.end());
  std::sort(out.t.begin(), out.t.end());
  enforce_increasing(out.t, t_far - t_near);
  fill_deltas(out, sentinel);
  return out;
}

}  // namespace sanerf::render
