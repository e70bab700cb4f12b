#include "data/image.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sanerf::data {

Image load_png(const std::string& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str()))
    throw IoError(strcat_("png read '", path, "': ", png.message));
  png.format = PNG_FORMAT_RGB;
  std::vector<unsigned char> buf(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr)) {
    std::string msg = png.message;
    png_image_free(&png);
    throw IoError(strcat_("png decode '", path, "': ", msg));
  }
  Image img(int(png.width), int(png.height));
  for (std::size_t i = 0; i < img.pix.size(); ++i)
    img.pix[i] = float(buf[i]) / 255.0f;
  return img;
}

void save_png(const std::string& path, const Image& img) {
  SANERF_CHECK(img.width > 0 && img.height > 0, "save_png: empty image");
  std::vector<unsigned char> buf(img.pix.size());
  for (std::size_t i = 0; i < img.pix.size(); ++i) {
    float v = std::clamp(img.pix[i], 0.0f, 1.0f);
    buf[i] = (unsigned char)std::lround(v * 255.0f);
  }
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = png_uint_32(img.width);
  png.height = png_uint_32(img.height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, buf.data(), 0, nullptr))
    throw IoError(strcat_("png write '", path, "': ", png.message));
}

Eigen::Vector3f bilinear(const Image& img, double u, double v) {
  u = std::clamp(u, 0.0, double(img.width - 1));
  v = std::clamp(v, 0.0, double(img.height - 1));
  int x0 = int(std::floor(u)), y0 = int(std::floor(v));
  int x1 = std::min(x0 + 1, img.width - 1);
  int y1 = std::min(y0 + 1, img.height - 1);
  double fu = u - x0, fv = v - y0;
  Eigen::Vector3f out;
  for (int c = 0; c < 3; ++c) {
    double top = (1 - fu) * img.at(x0, y0)[c] + fu * img.at(x1, y0)[c];
    double bot = (1 - fu) * img.at(x0, y1)[c] + fu * img.at(x1, y1)[c];
    out(c) = float((1 - fv) * top + fv * bot);
  }
  return out;
}

Image downscale_box(const Image& img, int factor) {
  SANERF_CHECK(factor >= 1, "downscale_box: factor must be >= 1");
  SANERF_SHAPE_CHECK(img.width % factor == 0 && img.height % factor == 0,
                     "downscale_box: ", img.width, "x", img.height,
                     " not divisible by ", factor);
  Image out(img.width / factor, img.height / factor);
  double inv = 1.0 / double(factor) / double(factor);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x)
      for (int c = 0; c < 3; ++c) {
        double s = 0;
        for (int dy = 0; dy < factor; ++dy)
          for (int dx = 0; dx < factor; ++dx)
            s += img.at(x * factor + dx, y * factor + dy)[c];
        out.at(x, y)[c] = float(s * inv);
      }
  return out;
}

Image resize_bilinear(const Image& img, int w, int h) {
  SANERF_CHECK(img.width > 0 && img.height > 0, "resize_bilinear: empty image");
  SANERF_CHECK(w > 0 && h > 0, "resize_bilinear: bad target size");
  if (w == img.width && h == img.height) return img;
  Image out(w, h);
  double sx = double(img.width) / w, sy = double(img.height) / h;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      Eigen::Vector3f c =
          bilinear(img, (x + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5);
      float* p = out.at(x, y);
      p[0] = c[0], p[1] = c[1], p[2] = c[2];
    }
  return out;
}

double mse(const Image& a, const Image& b) {
  SANERF_CHECK(a.width == b.width && a.height == b.height,
               "mse: image size mismatch");
  double s = 0;
  for (std::size_t i = 0; i < a.pix.size(); ++i) {
    double d = double(a.pix[i]) - double(b.pix[i]);
    s += d * d;
  }
  return s / double(a.pix.size());
}

}  // namespace sanerf::data
