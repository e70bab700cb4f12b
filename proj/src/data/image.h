#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "core/common.h"

namespace sanerf::data {

// float RGB in [0,1], row-major; pixel centers sit at integer coordinates
struct Image {
  int width = 0, height = 0;
  std::vector<float> pix;  // height * width * 3

  Image() = default;
  Image(int w, int h) : width(w), height(h), pix(std::size_t(w) * h * 3, 0.f) {}
  float* at(int x, int y) { return pix.data() + (std::size_t(y) * width + x) * 3; }
  const float* at(int x, int y) const {
    return pix.data() + (std::size_t(y) * width + x) * 3;
  }
};

Image load_png(const std::string& path);
void save_png(const std::string& path, const Image& img);  // 8-bit RGB

// bilinear sample at continuous (u,v); coordinates clamp to the image border
Eigen::Vector3f bilinear(const Image& img, double u, double v);

// box-filter average over factor x factor blocks; dims must divide evenly
Image downscale_box(const Image& img, int factor);

// bilinear resample to w x h (centers aligned, clamped edges)
Image resize_bilinear(const Image& img, int w, int h);

double mse(const Image& a, const Image& b);

}  // namespace sanerf::data
