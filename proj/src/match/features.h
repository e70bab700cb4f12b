#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "data/image.h"

namespace sanerf::match {

// Interest point with a fixed-length descriptor. Positions are subpixel
// full-resolution pixel coordinates; `scale` is the pyramid factor the
// feature was detected at (1, 2, 4, ...).
struct Feature {
  double u = 0, v = 0;
  double scale = 1;
  float response = 0;
  std::vector<float> desc;  // unit-L2, zero-mean intensity patch
};

struct HarrisConfig {
  int octaves = 3;            // pyramid levels (x1, x2, x4 downscale)
  int patch_radius = 5;       // 11x11 descriptor window
  double kappa = 0.05;        // corner response: det - kappa * trace^2
  double rel_threshold = 1e-7;  // keep responses >= rel_threshold * max
  int max_per_octave = 600;   // strongest-first cap
  int presmooth = 1;          // binomial blur passes per pyramid level
};

using Detector = std::function<std::vector<Feature>(const data::Image&)>;

// Multi-scale Harris corners with normalized intensity-patch descriptors.
std::vector<Feature> detect_features(const data::Image& img,
                                     const HarrisConfig& cfg = {});

// detect_features bound to a config, for use behind the Detector interface
Detector harris_detector(const HarrisConfig& cfg = {});

}  // namespace sanerf::match
