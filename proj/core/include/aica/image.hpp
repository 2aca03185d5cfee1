#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "aica/result.hpp"

namespace aica {

// 8-bit RGB raster, row-major, interleaved channels.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // size == width * height * 3

  static RasterImage filled(int width, int height, std::array<std::uint8_t, 3> rgb);

  bool empty() const noexcept { return width <= 0 || height <= 0; }
  std::size_t offset(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
            static_cast<std::size_t>(x)) * 3;
  }
  std::uint8_t* px(int x, int y) { return pixels.data() + offset(x, y); }
  const std::uint8_t* px(int x, int y) const { return pixels.data() + offset(x, y); }
  void set(int x, int y, std::array<std::uint8_t, 3> rgb) {
    auto* p = px(x, y);
    p[0] = rgb[0];
    p[1] = rgb[1];
    p[2] = rgb[2];
  }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

// Separable Gaussian blur per channel, kernel radius ceil(3*sigma), edges
// clamped. sigma == 0 returns the input unchanged.
RasterImage gaussian_smooth(const RasterImage& img, double sigma);

Result<RasterImage> read_png(const std::filesystem::path& path);
Status write_png(const RasterImage& img, const std::filesystem::path& path);
// In-memory PNG encoding (used for the base64 data URI sent to backends).
std::vector<std::uint8_t> encode_png(const RasterImage& img);

}  // namespace aica
