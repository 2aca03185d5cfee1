#pragma once

#include "aica/image.hpp"
#include "aica/result.hpp"
#include "aica/segmentation.hpp"

namespace aica {

// The region-indexed image sent to models during grounded prompting: red
// contours around every region plus its numeric id burned in near the
// region centroid.
struct ScaffoldedImage {
  RasterImage base;
  RegionMap region_map;
  RasterImage overlay;
  bool under_minimum = false;  // segmentation produced fewer than min_regions
};

// Deterministic overlay rendering; errors with DimensionMismatch when the
// map does not match the image.
Result<ScaffoldedImage> render_scaffold(const RasterImage& img, const RegionMap& map);

// Full pipeline: smooth -> segment -> merge to the 2-4 target -> render.
Result<ScaffoldedImage> build_scaffold(const RasterImage& img, const SegmentationParams& params);

}  // namespace aica
