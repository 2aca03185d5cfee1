#include <benchmark/benchmark.h>

#include <random>

#include "aica/metrics.hpp"
#include "aica/parsers.hpp"
#include "aica/prompts.hpp"
#include "aica/segmentation.hpp"

namespace {

aica::RasterImage random_image(int w, int h) {
  std::mt19937_64 rng(7);
  aica::RasterImage img = aica::RasterImage::filled(w, h, {0, 0, 0});
  static const std::array<std::array<std::uint8_t, 3>, 3> palette = {
      {{0, 0, 0}, {255, 255, 255}, {200, 30, 40}}};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.set(x, y, palette[rng() % 3]);
    }
  }
  return img;
}

void bm_segment_graph(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  aica::RasterImage img = random_image(dim, dim);
  aica::SegmentationParams params;
  params.sigma = 0.8;
  for (auto _ : state) {
    aica::RegionMap map = aica::segment_graph(img, params);
    benchmark::DoNotOptimize(map);
  }
  state.SetItemsProcessed(state.iterations() * dim * dim);
}
BENCHMARK(bm_segment_graph)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void bm_merge_to_target(benchmark::State& state) {
  aica::RasterImage img = random_image(128, 128);
  aica::SegmentationParams params;
  params.sigma = 0.0;
  params.scale = 20.0;
  params.min_size_ratio = 0.001;
  aica::RegionMap map = aica::segment_graph(img, params);
  for (auto _ : state) {
    auto merged = aica::merge_to_target(map, params);
    benchmark::DoNotOptimize(merged);
  }
}
BENCHMARK(bm_merge_to_target)->Unit(benchmark::kMillisecond);

void bm_weighted_f1(benchmark::State& state) {
  std::mt19937_64 rng(11);
  aica::ConfusionCounts counts(aica::TaxonomyId::Mikels8);
  const auto& labels = aica::label_space(aica::TaxonomyId::Mikels8);
  for (int i = 0; i < 10000; ++i) {
    (void)counts.add(labels[rng() % labels.size()], labels[rng() % labels.size()]);
  }
  for (auto _ : state) {
    auto value = aica::weighted_f1(counts);
    benchmark::DoNotOptimize(value);
  }
}
BENCHMARK(bm_weighted_f1);

void bm_parse_stage2(benchmark::State& state) {
  const std::string text =
      "Hypothesis A: awe (Intensity: High)\nEvidence: Region 1 shows a vast canyon wall.\n"
      "Hypothesis B: contentment (Intensity: Medium)\nEvidence: Region 2 shows calm water.\n"
      "Hypothesis C: fear (Intensity: Low)\nEvidence: Region 1 and Region 3 show shadows.\n";
  for (auto _ : state) {
    auto parsed = aica::parse_stage2(text, aica::TaxonomyId::Mikels8);
    benchmark::DoNotOptimize(parsed);
  }
}
BENCHMARK(bm_parse_stage2);

void bm_render_stage2_prompt(benchmark::State& state) {
  aica::PromptForge forge = aica::PromptForge::load(AICA_ASSETS_DIR);
  std::map<int, std::string> regions = {
      {1, "a canyon wall in warm light"}, {2, "calm water"}, {3, "distant figures"}};
  for (auto _ : state) {
    auto bundle = forge.gat_stage2(regions, "positive", aica::TaxonomyId::Mikels8);
    benchmark::DoNotOptimize(bundle);
  }
}
BENCHMARK(bm_render_stage2_prompt);

}  // namespace

BENCHMARK_MAIN();
