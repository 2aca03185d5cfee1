#include "aica/image.hpp"

#include <algorithm>
#include <cmath>

namespace aica {

RasterImage RasterImage::filled(int width, int height, std::array<std::uint8_t, 3> rgb) {
  RasterImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
    img.pixels[i] = rgb[0];
    img.pixels[i + 1] = rgb[1];
    img.pixels[i + 2] = rgb[2];
  }
  return img;
}

RasterImage gaussian_smooth(const RasterImage& img, double sigma) {
  if (sigma <= 0.0 || img.empty()) return img;

  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;

  const int w = img.width;
  const int h = img.height;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
  std::vector<double> horiz(n, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0.0, 0.0, 0.0};
      for (int i = -radius; i <= radius; ++i) {
        int sx = std::clamp(x + i, 0, w - 1);
        const std::uint8_t* p = img.px(sx, y);
        double kw = kernel[static_cast<std::size_t>(i + radius)];
        acc[0] += kw * p[0];
        acc[1] += kw * p[1];
        acc[2] += kw * p[2];
      }
      std::size_t o = img.offset(x, y);
      horiz[o] = acc[0];
      horiz[o + 1] = acc[1];
      horiz[o + 2] = acc[2];
    }
  }

  RasterImage out;
  out.width = w;
  out.height = h;
  out.pixels.resize(n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0.0, 0.0, 0.0};
      for (int i = -radius; i <= radius; ++i) {
        int sy = std::clamp(y + i, 0, h - 1);
        std::size_t o = img.offset(x, sy);
        double kw = kernel[static_cast<std::size_t>(i + radius)];
        acc[0] += kw * horiz[o];
        acc[1] += kw * horiz[o + 1];
        acc[2] += kw * horiz[o + 2];
      }
      std::size_t o = img.offset(x, y);
      for (int c = 0; c < 3; ++c) {
        long v = std::lround(acc[c]);
        out.pixels[o + static_cast<std::size_t>(c)] =
            static_cast<std::uint8_t>(std::clamp(v, 0l, 255l));
      }
    }
  }
  return out;
}

}  // namespace aica
