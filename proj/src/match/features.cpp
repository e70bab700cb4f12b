#include "match/features.h"

#include <algorithm>
#include <cmath>

#include "core/common.h"

namespace sanerf::match {

namespace {

// single-channel float plane
struct Gray {
  int w = 0, h = 0;
  std::vector<float> p;
  Gray() = default;
  Gray(int w_, int h_) : w(w_), h(h_), p(std::size_t(w_) * h_, 0.f) {}
  float at(int x, int y) const { return p[std::size_t(y) * w + x]; }
  float& at(int x, int y) { return p[std::size_t(y) * w + x]; }
};

Gray to_gray(const data::Image& img) {
  Gray g(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const float* c = img.at(x, y);
      g.at(x, y) = 0.299f * c[0] + 0.587f * c[1] + 0.114f * c[2];
    }
  return g;
}

// separable 5-tap binomial blur with clamped borders; suppresses rendering
// aliasing so corner responses stay stable across viewpoints
Gray blur5(const Gray& g) {
  static const float k[5] = {1.f / 16, 4.f / 16, 6.f / 16, 4.f / 16, 1.f / 16};
  Gray tmp(g.w, g.h), out(g.w, g.h);
  for (int y = 0; y < g.h; ++y)
    for (int x = 0; x < g.w; ++x) {
      float s = 0;
      for (int d = -2; d <= 2; ++d)
        s += k[d + 2] * g.at(std::clamp(x + d, 0, g.w - 1), y);
      tmp.at(x, y) = s;
    }
  for (int y = 0; y < g.h; ++y)
    for (int x = 0; x < g.w; ++x) {
      float s = 0;
      for (int d = -2; d <= 2; ++d)
        s += k[d + 2] * tmp.at(x, std::clamp(y + d, 0, g.h - 1));
      out.at(x, y) = s;
    }
  return out;
}

// 2x box downscale; odd trailing row/column is dropped
Gray half(const Gray& g) {
  Gray out(g.w / 2, g.h / 2);
  for (int y = 0; y < out.h; ++y)
    for (int x = 0; x < out.w; ++x)
      out.at(x, y) = 0.25f * (g.at(2 * x, 2 * y) + g.at(2 * x + 1, 2 * y) +
                              g.at(2 * x, 2 * y + 1) + g.at(2 * x + 1, 2 * y + 1));
  return out;
}

double sample_bilinear(const Gray& g, double u, double v) {
  u = std::min(std::max(u, 0.0), double(g.w - 1));
  v = std::min(std::max(v, 0.0), double(g.h - 1));
  int x0 = std::min(int(u), g.w - 2), y0 = std::min(int(v), g.h - 2);
  if (g.w == 1) x0 = 0;
  if (g.h == 1) y0 = 0;
  double fx = u - x0, fy = v - y0;
  int x1 = std::min(x0 + 1, g.w - 1), y1 = std::min(y0 + 1, g.h - 1);
  return (1 - fx) * (1 - fy) * g.at(x0, y0) + fx * (1 - fy) * g.at(x1, y0) +
         (1 - fx) * fy * g.at(x0, y1) + fx * fy * g.at(x1, y1);
}

// 1D quadratic peak offset from three samples; 0 when not concave
double subpixel_offset(double rm, double r0, double rp) {
  double denom = rp - 2 * r0 + rm;
  if (!(denom < -1e-30)) return 0.0;
  double d = -0.5 * (rp - rm) / denom;
  return std::min(std::max(d, -0.5), 0.5);
}

void detect_octave(const Gray& g, const HarrisConfig& cfg, double factor,
                   std::vector<Feature>& out) {
  const int w = g.w, h = g.h;
  const int margin = cfg.patch_radius + 2;
  if (w < 2 * margin + 3 || h < 2 * margin + 3) return;

  // Sobel gradients (interior)
  Gray ix(w, h), iy(w, h);
  for (int y = 1; y < h - 1; ++y)
    for (int x = 1; x < w - 1; ++x) {
      ix.at(x, y) = (g.at(x + 1, y - 1) - g.at(x - 1, y - 1)) +
                    2 * (g.at(x + 1, y) - g.at(x - 1, y)) +
                    (g.at(x + 1, y + 1) - g.at(x - 1, y + 1));
      iy.at(x, y) = (g.at(x - 1, y + 1) - g.at(x - 1, y - 1)) +
                    2 * (g.at(x, y + 1) - g.at(x, y - 1)) +
                    (g.at(x + 1, y + 1) - g.at(x + 1, y - 1));
    }

  // structure tensor smoothed with a 3x3 binomial window, then the Harris
  // corner response det(M) - kappa * trace(M)^2
  Gray resp(w, h);
  static const float kw[3] = {1.f / 4, 2.f / 4, 1.f / 4};
  float rmax = 0.f;
  for (int y = 2; y < h - 2; ++y)
    for (int x = 2; x < w - 2; ++x) {
      double sxx = 0, syy = 0, sxy = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          double wgt = double(kw[dy + 1]) * kw[dx + 1];
          double gx = ix.at(x + dx, y + dy), gy = iy.at(x + dx, y + dy);
          sxx += wgt * gx * gx;
          syy += wgt * gy * gy;
          sxy += wgt * gx * gy;
        }
      double r = (sxx * syy - sxy * sxy) - cfg.kappa * (sxx + syy) * (sxx + syy);
      resp.at(x, y) = float(r);
      rmax = std::max(rmax, float(r));
    }
  if (!(rmax > 0)) return;
  const float thr = float(cfg.rel_threshold * rmax);

  std::vector<Feature> cand;
  for (int y = margin; y < h - margin; ++y)
    for (int x = margin; x < w - margin; ++x) {
      float r = resp.at(x, y);
      if (r < thr) continue;
      bool peak = true;  // strict 3x3 non-max suppression
      for (int dy = -1; dy <= 1 && peak; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (resp.at(x + dx, y + dy) >= r) { peak = false; break; }
        }
      if (!peak) continue;

      double u = x + subpixel_offset(resp.at(x - 1, y), r, resp.at(x + 1, y));
      double v = y + subpixel_offset(resp.at(x, y - 1), r, resp.at(x, y + 1));

      Feature f;
      f.response = r;
      f.scale = factor;
      // box pyramid alignment: level pixel p covers full-res centers
      // [factor*p, factor*p + factor - 1], midpoint factor*p + (factor-1)/2
      f.u = factor * u + 0.5 * (factor - 1);
      f.v = factor * v + 0.5 * (factor - 1);

      const int R = cfg.patch_radius, D = 2 * R + 1;
      f.desc.resize(std::size_t(D) * D);
      double mean = 0;
      for (int dy = -R; dy <= R; ++dy)
        for (int dx = -R; dx <= R; ++dx) {
          double s = sample_bilinear(g, u + dx, v + dy);
          f.desc[std::size_t(dy + R) * D + (dx + R)] = float(s);
          mean += s;
        }
      mean /= double(D) * D;
      double nrm = 0;
      for (float& d : f.desc) {
        d -= float(mean);
        nrm += double(d) * d;
      }
      nrm = std::sqrt(nrm);
      if (nrm < 1e-6) continue;  // featureless patch, nothing to match on
      for (float& d : f.desc) d = float(d / nrm);
      cand.push_back(std::move(f));
    }

  // strongest first, position tie-break for determinism
  std::sort(cand.begin(), cand.end(), [](const Feature& a, const Feature& b) {
    if (a.response != b.response) return a.response > b.response;
    if (a.v != b.v) return a.v < b.v;
    return a.u < b.u;
  });
  if (int(cand.size()) > cfg.max_per_octave) cand.resize(cfg.max_per_octave);
  for (auto& f : cand) out.push_back(std::move(f));
}

}  // namespace

std::vector<Feature> detect_features(const data::Image& img,
                                     const HarrisConfig& cfg) {
  SANERF_CHECK(img.width > 0 && img.height > 0, "detect_features: empty image");
  SANERF_CHECK(cfg.octaves >= 1 && cfg.patch_radius >= 1,
               "detect_features: bad config");
  std::vector<Feature> out;
  Gray g = to_gray(img);
  double factor = 1;
  for (int o = 0; o < cfg.octaves; ++o) {
    Gray level = g;
    for (int s = 0; s < cfg.presmooth; ++s) level = blur5(level);
    detect_octave(level, cfg, factor, out);
    if (g.w < 4 || g.h < 4) break;
    g = half(g);
    factor *= 2;
  }
  return out;
}

Detector harris_detector(const HarrisConfig& cfg) {
  return [cfg](const data::Image& img) { return detect_features(img, cfg); };
}

}  // namespace sanerf::match
