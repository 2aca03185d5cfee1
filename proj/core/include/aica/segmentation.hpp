#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "aica/image.hpp"

namespace aica {

struct SegmentationParams {
  double scale = 300.0;        // threshold constant of the merge rule
  double sigma = 0.8;          // pre-smoothing std-dev in pixels
  double min_size_ratio = 0.01;  // minimum component size as fraction of total pixels
  int min_regions = 2;
  int max_regions = 4;

  bool valid() const noexcept {
    return scale > 0.0 && sigma >= 0.0 && min_size_ratio > 0.0 && min_size_ratio <= 1.0 &&
           min_regions >= 1 && max_regions >= min_regions;
  }
};

struct RegionInfo {
  std::int64_t area = 0;
  std::array<double, 3> mean_color{};  // computed on the raw image
};

// Per-pixel labeling with 1-based consecutive region ids in first-pixel
// scan order. Every region is 8-connected and areas sum to width*height.
struct RegionMap {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> labels;  // row-major, values in [1, region_count()]
  std::vector<RegionInfo> regions;   // regions[id-1]

  int region_count() const noexcept { return static_cast<int>(regions.size()); }
  std::int32_t label_at(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

// Graph-based segmentation: 8-connectivity grid graph over the smoothed
// image with Euclidean RGB edge weights, edges sorted ascending (ties keep
// (row, col, direction) generation order), components merged when the edge
// weight is within min(Int(C1)+scale/|C1|, Int(C2)+scale/|C2|), then a
// post-pass that folds every component smaller than min_size_ratio*total
// into its minimum-weight adjacent component.
RegionMap segment_graph(const RasterImage& img, const SegmentationParams& params);

struct RegionAdjacencyGraph {
  int node_count = 0;
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;  // a < b, sorted
};

RegionAdjacencyGraph build_rag(const RegionMap& map);

struct MergeResult {
  RegionMap map;
  bool under_minimum = false;  // initial count was below min_regions
};

// Repeatedly folds the smallest region (ties: lowest id) into its
// largest-area adjacent region (ties: lowest id) until the count is at most
// max_regions. A map that starts below min_regions is returned unchanged
// with the warning flag set.
MergeResult merge_to_target(const RegionMap& map, const SegmentationParams& params);

// Boundary pixels per region: pixels with a 4-neighbor of another id or on
// the image border. contours[id-1] holds (x, y) pairs in scan order.
std::vector<std::vector<std::pair<int, int>>> extract_contours(const RegionMap& map);

// Debug export: {width, height, run-length-encoded labels, region areas}.
std::string region_map_json(const RegionMap& map);

}  // namespace aica
