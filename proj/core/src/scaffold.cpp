#include "aica/scaffold.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace aica {

namespace {

constexpr std::array<std::uint8_t, 3> kRed = {255, 0, 0};
constexpr std::array<std::uint8_t, 3> kWhite = {255, 255, 255};

// 5x7 bitmap digits, one byte per row, low 5 bits used (MSB-left).
constexpr std::uint8_t kDigitRows[10][7] = {
    {0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e},  // 0
    {0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e},  // 1
    {0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f},  // 2
    {0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e},  // 3
    {0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02},  // 4
    {0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e},  // 5
    {0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e},  // 6
    {0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},  // 7
    {0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e},  // 8
    {0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c},  // 9
};

int glyph_scale(int width, int height) {
  int s = std::min(width, height) / 64;
  return std::clamp(s, 1, 4);
}

void fill_rect(RasterImage& img, int x0, int y0, int w, int h,
               std::array<std::uint8_t, 3> rgb) {
  for (int y = std::max(0, y0); y < std::min(img.height, y0 + h); ++y) {
    for (int x = std::max(0, x0); x < std::min(img.width, x0 + w); ++x) {
      img.set(x, y, rgb);
    }
  }
}

void draw_digit(RasterImage& img, int digit, int x0, int y0, int scale) {
  for (int row = 0; row < 7; ++row) {
    std::uint8_t bits = kDigitRows[digit][row];
    for (int col = 0; col < 5; ++col) {
      if ((bits >> (4 - col)) & 1) {
        fill_rect(img, x0 + col * scale, y0 + row * scale, scale, scale, kWhite);
      }
    }
  }
}

void draw_region_id(RasterImage& img, int id, int anchor_x, int anchor_y) {
  const std::string digits = std::to_string(id);
  const int s = glyph_scale(img.width, img.height);
  const int ndigits = static_cast<int>(digits.size());
  const int pad = s;
  const int box_w = 2 * pad + ndigits * 5 * s + (ndigits - 1) * s;
  const int box_h = 2 * pad + 7 * s;
  int x0 = anchor_x - box_w / 2;
  int y0 = anchor_y - box_h / 2;
  x0 = std::clamp(x0, 0, std::max(0, img.width - box_w));
  y0 = std::clamp(y0, 0, std::max(0, img.height - box_h));
  fill_rect(img, x0, y0, box_w, box_h, kRed);
  for (int i = 0; i < ndigits; ++i) {
    draw_digit(img, digits[static_cast<std::size_t>(i)] - '0',
               x0 + pad + i * (5 * s + s), y0 + pad, s);
  }
}

}  // namespace

Result<ScaffoldedImage> render_scaffold(const RasterImage& img, const RegionMap& map) {
  if (img.width != map.width || img.height != map.height) {
    return make_error(Errc::DimensionMismatch, "image and region map dimensions differ");
  }

  ScaffoldedImage out;
  out.base = img;
  out.region_map = map;
  out.overlay = img;

  const auto contours = extract_contours(map);
  std::vector<char> is_contour(map.labels.size(), 0);
  for (const auto& region : contours) {
    for (const auto& [x, y] : region) {
      std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(map.width) +
                      static_cast<std::size_t>(x);
      is_contour[i] = 1;
      out.overlay.set(x, y, kRed);
    }
  }

  // Per-region centroids and the interior pixel closest to each one.
  const int n = map.region_count();
  std::vector<double> cx(static_cast<std::size_t>(n), 0.0);
  std::vector<double> cy(static_cast<std::size_t>(n), 0.0);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      std::size_t r = static_cast<std::size_t>(map.label_at(x, y) - 1);
      cx[r] += x;
      cy[r] += y;
    }
  }
  for (int r = 0; r < n; ++r) {
    auto area = static_cast<double>(map.regions[static_cast<std::size_t>(r)].area);
    cx[static_cast<std::size_t>(r)] /= area;
    cy[static_cast<std::size_t>(r)] /= area;
  }

  std::vector<std::pair<int, int>> anchor(static_cast<std::size_t>(n), {-1, -1});
  std::vector<double> best(static_cast<std::size_t>(n), std::numeric_limits<double>::max());
  std::vector<char> anchor_interior(static_cast<std::size_t>(n), 0);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(map.width) +
                      static_cast<std::size_t>(x);
      std::size_t r = static_cast<std::size_t>(map.labels[i] - 1);
      bool interior = is_contour[i] == 0;
      // Interior pixels beat contour pixels; within a class, nearest to the
      // centroid wins and scan order breaks ties.
      if (anchor_interior[r] != 0 && !interior) continue;
      double dx = x - cx[r];
      double dy = y - cy[r];
      double d = dx * dx + dy * dy;
      bool upgrade = interior && anchor_interior[r] == 0;
      if (upgrade || d < best[r]) {
        if (upgrade) anchor_interior[r] = 1;
        best[r] = d;
        anchor[r] = {x, y};
      }
    }
  }

  for (int id = 1; id <= n; ++id) {
    const auto& [ax, ay] = anchor[static_cast<std::size_t>(id - 1)];
    draw_region_id(out.overlay, id, ax, ay);
  }
  return out;
}

Result<ScaffoldedImage> build_scaffold(const RasterImage& img, const SegmentationParams& params) {
  if (img.empty()) return make_error(Errc::DimensionMismatch, "empty image");
  RegionMap segmented = segment_graph(img, params);
  MergeResult merged = merge_to_target(segmented, params);
  auto scaffold = render_scaffold(img, merged.map);
  if (!scaffold.ok()) return scaffold;
  ScaffoldedImage out = std::move(scaffold).take();
  out.under_minimum = merged.under_minimum;
  return out;
}

}  // namespace aica
