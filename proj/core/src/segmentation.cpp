#include "aica/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

namespace aica {

namespace {

struct GridEdge {
  std::int32_t a;
  std::int32_t b;
  double weight;
};

double rgb_distance(const RasterImage& img, std::int32_t a, std::int32_t b) {
  const std::uint8_t* pa = img.pixels.data() + static_cast<std::size_t>(a) * 3;
  const std::uint8_t* pb = img.pixels.data() + static_cast<std::size_t>(b) * 3;
  double dr = static_cast<double>(pa[0]) - pb[0];
  double dg = static_cast<double>(pa[1]) - pb[1];
  double db = static_cast<double>(pa[2]) - pb[2];
  return std::sqrt(dr * dr + dg * dg + db * db);
}

// Edges in canonical (row, col, direction) order: E, S, SE, SW per pixel.
// stable_sort on weight then preserves exactly this order for ties.
std::vector<GridEdge> build_grid_edges(const RasterImage& img) {
  const int w = img.width;
  const int h = img.height;
  std::vector<GridEdge> edges;
  edges.reserve(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 4);
  constexpr int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {-1, 1}};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int32_t a = y * w + x;
      for (const auto& d : dirs) {
        int nx = x + d[0];
        int ny = y + d[1];
        if (nx < 0 || nx >= w || ny >= h) continue;
        std::int32_t b = ny * w + nx;
        edges.push_back(GridEdge{a, b, rgb_distance(img, a, b)});
      }
    }
  }
  std::stable_sort(edges.begin(), edges.end(),
                   [](const GridEdge& l, const GridEdge& r) { return l.weight < r.weight; });
  return edges;
}

class DisjointSet {
 public:
  explicit DisjointSet(std::int32_t n)
      : parent_(static_cast<std::size_t>(n)),
        size_(static_cast<std::size_t>(n), 1),
        internal_(static_cast<std::size_t>(n), 0.0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::int32_t find(std::int32_t v) {
    std::int32_t root = v;
    while (parent_[static_cast<std::size_t>(root)] != root) {
      root = parent_[static_cast<std::size_t>(root)];
    }
    while (parent_[static_cast<std::size_t>(v)] != root) {
      std::int32_t next = parent_[static_cast<std::size_t>(v)];
      parent_[static_cast<std::size_t>(v)] = root;
      v = next;
    }
    return root;
  }

  // Joins the roots a and b; the merged component records `weight` as its
  // internal maximum (edges arrive in ascending order).
  void join(std::int32_t a, std::int32_t b, double weight) {
    if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) {
      std::swap(a, b);
    }
    parent_[static_cast<std::size_t>(b)] = a;
    size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
    internal_[static_cast<std::size_t>(a)] = weight;
  }

  std::int64_t size(std::int32_t root) const { return size_[static_cast<std::size_t>(root)]; }
  double internal(std::int32_t root) const { return internal_[static_cast<std::size_t>(root)]; }

 private:
  std::vector<std::int32_t> parent_;
  std::vector<std::int64_t> size_;
  std::vector<double> internal_;
};

RegionMap relabel_from_roots(const RasterImage& raw, DisjointSet& dsu, int w, int h) {
  RegionMap map;
  map.width = w;
  map.height = h;
  const std::size_t total = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  map.labels.assign(total, 0);

  std::map<std::int32_t, std::int32_t> root_to_id;  // assigned in scan order
  std::vector<std::array<double, 3>> color_sums;
  for (std::size_t i = 0; i < total; ++i) {
    std::int32_t root = dsu.find(static_cast<std::int32_t>(i));
    auto it = root_to_id.find(root);
    std::int32_t id;
    if (it == root_to_id.end()) {
      id = static_cast<std::int32_t>(map.regions.size()) + 1;
      root_to_id.emplace(root, id);
      map.regions.push_back(RegionInfo{});
      color_sums.push_back({0.0, 0.0, 0.0});
    } else {
      id = it->second;
    }
    map.labels[i] = id;
    RegionInfo& info = map.regions[static_cast<std::size_t>(id - 1)];
    info.area += 1;
    const std::uint8_t* p = raw.pixels.data() + i * 3;
    auto& sums = color_sums[static_cast<std::size_t>(id - 1)];
    sums[0] += p[0];
    sums[1] += p[1];
    sums[2] += p[2];
  }
  for (std::size_t r = 0; r < map.regions.size(); ++r) {
    auto area = static_cast<double>(map.regions[r].area);
    for (int c = 0; c < 3; ++c) map.regions[r].mean_color[static_cast<std::size_t>(c)] =
        color_sums[r][static_cast<std::size_t>(c)] / area;
  }
  return map;
}

}  // namespace

RegionMap segment_graph(const RasterImage& img, const SegmentationParams& params) {
  const int w = img.width;
  const int h = img.height;
  const std::int32_t total = static_cast<std::int32_t>(w) * h;

  const RasterImage smoothed = gaussian_smooth(img, params.sigma);
  const std::vector<GridEdge> edges = build_grid_edges(smoothed);

  DisjointSet dsu(total);
  for (const GridEdge& e : edges) {
    std::int32_t ra = dsu.find(e.a);
    std::int32_t rb = dsu.find(e.b);
    if (ra == rb) continue;
    double ta = dsu.internal(ra) + params.scale / static_cast<double>(dsu.size(ra));
    double tb = dsu.internal(rb) + params.scale / static_cast<double>(dsu.size(rb));
    if (e.weight <= ta && e.weight <= tb) {
      dsu.join(ra, rb, e.weight);
    }
  }

  // Single post-pass over the ascending edge list: an undersized component
  // meets its cheapest outgoing edge first, so joining there folds it into
  // its minimum-weight adjacent component.
  const double min_size = params.min_size_ratio * static_cast<double>(total);
  for (const GridEdge& e : edges) {
    std::int32_t ra = dsu.find(e.a);
    std::int32_t rb = dsu.find(e.b);
    if (ra == rb) continue;
    if (static_cast<double>(dsu.size(ra)) < min_size ||
        static_cast<double>(dsu.size(rb)) < min_size) {
      dsu.join(ra, rb, std::max({dsu.internal(ra), dsu.internal(rb), e.weight}));
    }
  }

  return relabel_from_roots(img, dsu, w, h);
}

RegionAdjacencyGraph build_rag(const RegionMap& map) {
  RegionAdjacencyGraph rag;
  rag.node_count = map.region_count();
  std::set<std::pair<std::int32_t, std::int32_t>> edge_set;
  const int w = map.width;
  const int h = map.height;
  constexpr int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {-1, 1}};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int32_t a = map.label_at(x, y);
      for (const auto& d : dirs) {
        int nx = x + d[0];
        int ny = y + d[1];
        if (nx < 0 || nx >= w || ny >= h) continue;
        std::int32_t b = map.label_at(nx, ny);
        if (a != b) edge_set.emplace(std::min(a, b), std::max(a, b));
      }
    }
  }
  rag.edges.assign(edge_set.begin(), edge_set.end());
  return rag;
}

MergeResult merge_to_target(const RegionMap& map, const SegmentationParams& params) {
  MergeResult result{map, false};
  const int initial = map.region_count();
  if (initial < params.min_regions) {
    result.under_minimum = true;
    return result;
  }
  if (initial <= params.max_regions) return result;

  RegionAdjacencyGraph rag = build_rag(map);
  std::vector<std::int64_t> area(static_cast<std::size_t>(initial));
  std::vector<std::array<double, 3>> color_sum(static_cast<std::size_t>(initial));
  for (int i = 0; i < initial; ++i) {
    const RegionInfo& info = map.regions[static_cast<std::size_t>(i)];
    area[static_cast<std::size_t>(i)] = info.area;
    for (std::size_t c = 0; c < 3; ++c) {
      color_sum[static_cast<std::size_t>(i)][c] =
          info.mean_color[c] * static_cast<double>(info.area);
    }
  }
  std::vector<std::set<std::int32_t>> adj(static_cast<std::size_t>(initial) + 1);
  for (const auto& [a, b] : rag.edges) {
    adj[static_cast<std::size_t>(a)].insert(b);
    adj[static_cast<std::size_t>(b)].insert(a);
  }

  std::set<std::int32_t> alive;
  for (std::int32_t id = 1; id <= initial; ++id) alive.insert(id);
  std::vector<std::int32_t> merged_into(static_cast<std::size_t>(initial) + 1, 0);

  while (static_cast<int>(alive.size()) > params.max_regions) {
    std::int32_t smallest = 0;
    std::int64_t smallest_area = std::numeric_limits<std::int64_t>::max();
    for (std::int32_t id : alive) {
      if (area[static_cast<std::size_t>(id - 1)] < smallest_area) {
        smallest = id;
        smallest_area = area[static_cast<std::size_t>(id - 1)];
      }
    }
    std::int32_t partner = 0;
    std::int64_t partner_area = -1;
    for (std::int32_t n : adj[static_cast<std::size_t>(smallest)]) {
      if (area[static_cast<std::size_t>(n - 1)] > partner_area) {
        partner = n;
        partner_area = area[static_cast<std::size_t>(n - 1)];
      }
    }
    if (partner == 0) break;  // isolated region; nothing to merge into

    area[static_cast<std::size_t>(partner - 1)] += area[static_cast<std::size_t>(smallest - 1)];
    for (std::size_t c = 0; c < 3; ++c) {
      color_sum[static_cast<std::size_t>(partner - 1)][c] +=
          color_sum[static_cast<std::size_t>(smallest - 1)][c];
    }
    for (std::int32_t n : adj[static_cast<std::size_t>(smallest)]) {
      adj[static_cast<std::size_t>(n)].erase(smallest);
      if (n != partner) {
        adj[static_cast<std::size_t>(n)].insert(partner);
        adj[static_cast<std::size_t>(partner)].insert(n);
      }
    }
    adj[static_cast<std::size_t>(smallest)].clear();
    alive.erase(smallest);
    merged_into[static_cast<std::size_t>(smallest)] = partner;
  }

  auto resolve = [&](std::int32_t id) {
    while (merged_into[static_cast<std::size_t>(id)] != 0) {
      id = merged_into[static_cast<std::size_t>(id)];
    }
    return id;
  };

  // Relabel consecutively in first-pixel scan order.
  RegionMap out;
  out.width = map.width;
  out.height = map.height;
  out.labels.assign(map.labels.size(), 0);
  std::map<std::int32_t, std::int32_t> old_to_new;
  std::vector<std::int32_t> new_to_old;
  for (std::size_t i = 0; i < map.labels.size(); ++i) {
    std::int32_t survivor = resolve(map.labels[i]);
    auto it = old_to_new.find(survivor);
    std::int32_t id;
    if (it == old_to_new.end()) {
      id = static_cast<std::int32_t>(new_to_old.size()) + 1;
      old_to_new.emplace(survivor, id);
      new_to_old.push_back(survivor);
    } else {
      id = it->second;
    }
    out.labels[i] = id;
  }
  out.regions.resize(new_to_old.size());
  for (std::size_t r = 0; r < new_to_old.size(); ++r) {
    std::int32_t old_id = new_to_old[r];
    RegionInfo info;
    info.area = area[static_cast<std::size_t>(old_id - 1)];
    for (std::size_t c = 0; c < 3; ++c) {
      info.mean_color[c] =
          color_sum[static_cast<std::size_t>(old_id - 1)][c] / static_cast<double>(info.area);
    }
    out.regions[r] = info;
  }
  result.map = std::move(out);
  return result;
}

std::vector<std::vector<std::pair<int, int>>> extract_contours(const RegionMap& map) {
  std::vector<std::vector<std::pair<int, int>>> contours(
      static_cast<std::size_t>(map.region_count()));
  const int w = map.width;
  const int h = map.height;
  constexpr int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int32_t id = map.label_at(x, y);
      bool boundary = x == 0 || y == 0 || x == w - 1 || y == h - 1;
      if (!boundary) {
        for (const auto& d : dirs) {
          if (map.label_at(x + d[0], y + d[1]) != id) {
            boundary = true;
            break;
          }
        }
      }
      if (boundary) contours[static_cast<std::size_t>(id - 1)].emplace_back(x, y);
    }
  }
  return contours;
}

std::string region_map_json(const RegionMap& map) {
  nlohmann::ordered_json doc;
  doc["schema"] = "aica.regions.v1";
  doc["width"] = map.width;
  doc["height"] = map.height;
  nlohmann::ordered_json rle = nlohmann::ordered_json::array();
  std::size_t i = 0;
  while (i < map.labels.size()) {
    std::size_t j = i;
    while (j < map.labels.size() && map.labels[j] == map.labels[i]) ++j;
    rle.push_back({map.labels[i], j - i});
    i = j;
  }
  doc["labels_rle"] = std::move(rle);
  nlohmann::ordered_json regions = nlohmann::ordered_json::array();
  for (int id = 1; id <= map.region_count(); ++id) {
    const RegionInfo& info = map.regions[static_cast<std::size_t>(id - 1)];
    regions.push_back({{"id", id},
                       {"area", info.area},
                       {"mean_color", {info.mean_color[0], info.mean_color[1],
                                       info.mean_color[2]}}});
  }
  doc["regions"] = std::move(regions);
  return doc.dump();
}

}  // namespace aica
