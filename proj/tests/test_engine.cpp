#include <doctest.h>

#include <cstdio>

#include "aica/engine.hpp"
#include "aica/hash.hpp"
#include "aica/image.hpp"
#include "support/test_util.hpp"

using namespace aica;

namespace {

const PromptForge& forge() {
  static PromptForge f = PromptForge::load(AICA_ASSETS_DIR);
  return f;
}

struct EngineFixture {
  testutil::TempDir tmp;
  std::string image_path;

  EngineFixture() {
    RasterImage img = RasterImage::filled(24, 16, {10, 10, 10});
    for (int y = 0; y < 16; ++y) {
      for (int x = 12; x < 24; ++x) img.set(x, y, {230, 230, 230});
    }
    image_path = (tmp / "item.png").string();
    REQUIRE(write_png(img, image_path).ok());
  }

  EvalItem item(Task task, Strategy strategy, const std::string& label = "awe") const {
    EvalItem item;
    item.id = "item-1";
    item.image_path = image_path;
    item.label = label;
    item.taxonomy = TaxonomyId::Mikels8;
    item.task = task;
    item.strategy = strategy;
    return item;
  }
};

std::string stage2_three(const char* a, const char* b, const char* c) {
  return std::string("Hypothesis A: ") + a +
         " (Intensity: Low)\nEvidence: Region 1 shows detail\n" +
         "Hypothesis B: " + b + " (Intensity: Medium)\nEvidence: Region 2 shows detail\n" +
         "Hypothesis C: " + c + " (Intensity: High)\nEvidence: Region 1 and Region 2\n";
}

std::string verdict(double score) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "Score: %.2f\nCritique: fine", score);
  return buf;
}

FixtureScript gat_script(const std::string& stage2, std::vector<double> scores,
                         const std::string& stage1 = "Region 1: dark half\nRegion 2: bright half",
                         const std::string& polarity = "positive") {
  FixtureScript script;
  script.mode = FixtureScript::Mode::Sequential;
  script.entries.push_back({FixtureEntry::MatchKind::Template, "GatStage1", stage1});
  script.entries.push_back({FixtureEntry::MatchKind::Template, "GatPolarityProbe", polarity});
  script.entries.push_back({FixtureEntry::MatchKind::Template, "GatStage2", stage2});
  for (double s : scores) {
    script.entries.push_back({FixtureEntry::MatchKind::Template, "GatStage3", verdict(s)});
  }
  return script;
}

EngineOptions default_options() {
  EngineOptions options;
  options.scaffold.sigma = 0.0;
  options.scaffold.scale = 50.0;
  options.model_name = "fixture-model";
  return options;
}

}  // namespace

TEST_CASE("affect_tot prunes below threshold and picks the argmax survivor") {
  EngineFixture fx;
  FixtureBackend backend(gat_script(stage2_three("contentment", "awe", "fear"),
                                    {0.3, 0.9, 0.9}));
  Engine engine(forge(), backend, default_options());
  RunRecord record = engine.run_affect_tot(fx.item(Task::EuEvoked, Strategy::Gat));

  REQUIRE(record.status == RunStatus::Ok);
  REQUIRE(record.trace.has_value());
  const GatTrace& trace = *record.trace;
  CHECK(trace.pruned == std::set<int>{0});
  CHECK(trace.chosen == 1);  // 0.9 tie resolves to the lower index
  CHECK(trace.final_label == "awe");
  CHECK(record.prediction == "awe");
  CHECK(!trace.low_confidence);
  CHECK(backend.calls() == 6);  // 3 + H with H = 3
  CHECK(record.raw.size() == 6);
  CHECK(trace.region_count == 2);
  CHECK(trace.polarity_estimate == "positive");
}

TEST_CASE("affect_tot falls back to the global argmax when every branch is pruned") {
  EngineFixture fx;
  FixtureBackend backend(gat_script(stage2_three("contentment", "awe", "fear"),
                                    {0.2, 0.1, 0.3}));
  Engine engine(forge(), backend, default_options());
  RunRecord record = engine.run_affect_tot(fx.item(Task::EuEvoked, Strategy::Gat));

  REQUIRE(record.status == RunStatus::Ok);
  const GatTrace& trace = *record.trace;
  CHECK(trace.pruned == std::set<int>{0, 1, 2});
  CHECK(trace.chosen == 2);
  CHECK(trace.low_confidence);
  CHECK(trace.final_label == "fear");
}

TEST_CASE("affect_tot issues exactly 3 + H backend calls") {
  EngineFixture fx;
  // Only two parseable hypotheses: the third uses an unknown label.
  const std::string stage2 =
      "Hypothesis A: awe (Intensity: High)\nEvidence: Region 1\n"
      "Hypothesis B: happiness (Intensity: Low)\nEvidence: Region 2\n"
      "Hypothesis C: fear (Intensity: Low)\nEvidence: Region 2\n";
  FixtureBackend backend(gat_script(stage2, {0.8, 0.6}));
  Engine engine(forge(), backend, default_options());
  RunRecord record = engine.run_affect_tot(fx.item(Task::EuEvoked, Strategy::Gat));

  REQUIRE(record.status == RunStatus::Ok);
  CHECK(record.trace->hypotheses.size() == 2);
  CHECK(backend.calls() == 5);
  CHECK(record.trace->warnings.size() >= 1);  // dropped hypothesis B
  CHECK(record.trace->final_label == "awe");
}

TEST_CASE("chosen hypothesis is invariant under positive scaling of the scores") {
  EngineFixture fx;
  const std::vector<std::vector<double>> score_sets = {
      {0.6, 0.9, 0.3}, {0.4, 0.2, 0.3}, {0.9, 0.9, 0.1}};
  for (const auto& scores : score_sets) {
    std::vector<double> scaled;
    for (double s : scores) scaled.push_back(s * 0.5);

    FixtureBackend a(gat_script(stage2_three("contentment", "awe", "fear"), scores));
    FixtureBackend b(gat_script(stage2_three("contentment", "awe", "fear"), scaled));
    Engine ea(forge(), a, default_options());
    Engine eb(forge(), b, default_options());
    RunRecord ra = ea.run_affect_tot(fx.item(Task::EuEvoked, Strategy::Gat));
    RunRecord rb = eb.run_affect_tot(fx.item(Task::EuEvoked, Strategy::Gat));
    REQUIRE(ra.status == RunStatus::Ok);
    REQUIRE(rb.status == RunStatus::Ok);
    CHECK(ra.trace->chosen == rb.trace->chosen);
  }
}

TEST_CASE("affect_tot surfaces parse failures with the failing stage") {
  EngineFixture fx;

  SUBCASE("stage 1 without regions") {
    FixtureScript script;
    script.mode = FixtureScript::Mode::Sequential;
    script.entries.push_back({FixtureEntry::MatchKind::Any, "", "no structure at all"});
    FixtureBackend backend(std::move(script));
    Engine engine(forge(), backend, default_options());
    RunRecord record = engine.run_affect_tot(fx.item(Task::EuEvoked, Strategy::Gat));
    CHECK(record.status == RunStatus::ParseFailed);
    CHECK(record.error.find("stage1") != std::string::npos);
    CHECK(!record.prediction.has_value());
    CHECK(backend.calls() == 1);
  }

  SUBCASE("stage 2 without hypotheses") {
    FixtureScript script;
    script.mode = FixtureScript::Mode::Sequential;
    script.entries.push_back({FixtureEntry::MatchKind::Any, "", "Region 1: sky"});
    script.entries.push_back({FixtureEntry::MatchKind::Any, "", "positive"});
    script.entries.push_back({FixtureEntry::MatchKind::Any, "", "I have no ideas"});
    FixtureBackend backend(std::move(script));
    Engine engine(forge(), backend, default_options());
    RunRecord record = engine.run_affect_tot(fx.item(Task::EuEvoked, Strategy::Gat));
    CHECK(record.status == RunStatus::ParseFailed);
    CHECK(record.error.find("stage2") != std::string::npos);
    CHECK(backend.calls() == 3);
  }

  SUBCASE("backend exhaustion becomes BackendFailed") {
    FixtureScript script;
    script.mode = FixtureScript::Mode::Sequential;
    FixtureBackend backend(std::move(script));
    Engine engine(forge(), backend, default_options());
    RunRecord record = engine.run_affect_tot(fx.item(Task::EuEvoked, Strategy::Gat));
    CHECK(record.status == RunStatus::BackendFailed);
  }
}

TEST_CASE("replaying the raw log through the parsers reproduces the trace") {
  EngineFixture fx;
  FixtureBackend backend(gat_script(stage2_three("contentment", "awe", "fear"),
                                    {0.3, 0.9, 0.4}));
  Engine engine(forge(), backend, default_options());
  RunRecord record = engine.run_affect_tot(fx.item(Task::EuEvoked, Strategy::Gat));
  REQUIRE(record.status == RunStatus::Ok);
  REQUIRE(record.raw.size() == 6);

  // Serialization of a full GAT record round-trips byte for byte.
  const std::string line = run_record_to_jsonl(record);
  auto reread = run_record_from_jsonl(line);
  REQUIRE(reread.ok());
  CHECK(run_record_to_jsonl(reread.value()) == line);

  auto stage1 = parse_stage1(record.raw[0].response);
  REQUIRE(stage1.ok());
  CHECK(stage1.value() == record.trace->stage1);
  CHECK(parse_polarity(record.raw[1].response).polarity == ScenePolarity::Positive);
  auto stage2 = parse_stage2(record.raw[2].response, TaxonomyId::Mikels8);
  REQUIRE(stage2.ok());
  REQUIRE(stage2.value().hypotheses.size() == record.trace->hypotheses.size());
  for (std::size_t i = 0; i < stage2.value().hypotheses.size(); ++i) {
    CHECK(stage2.value().hypotheses[i] == record.trace->hypotheses[i]);
    Stage3Parse v = parse_stage3(record.raw[3 + i].response);
    CHECK(v.verdict == record.trace->verdicts[i]);
  }
}

TEST_CASE("grounded generation sends one scaffolded call with the target emotion") {
  EngineFixture fx;
  FixtureScript script;
  script.mode = FixtureScript::Mode::Keyed;
  script.entries.push_back({FixtureEntry::MatchKind::Template, "GatEgcg",
                            "A canyon stretches in quiet grandeur."});
  FixtureBackend backend(std::move(script));
  Engine engine(forge(), backend, default_options());
  RunRecord record = engine.run_grounded_generation(fx.item(Task::Egcg, Strategy::Gat, "awe"));

  REQUIRE(record.status == RunStatus::Ok);
  CHECK(record.prediction == "A canyon stretches in quiet grandeur.");
  CHECK(backend.calls() == 1);
  CHECK(backend.log()[0].prompt.find("awe") != std::string::npos);
  CHECK(record.template_id == "GatEgcg");
}

TEST_CASE("baseline EU parses the choice and records the template") {
  EngineFixture fx;

  SUBCASE("basic answer parsed") {
    FixtureScript script;
    script.entries.push_back({FixtureEntry::MatchKind::Any, "", "Contentment."});
    FixtureBackend backend(std::move(script));
    Engine engine(forge(), backend, default_options());
    RunRecord record = engine.run_baseline(fx.item(Task::EuExpressed, Strategy::Basic));
    REQUIRE(record.status == RunStatus::Ok);
    CHECK(record.prediction == "contentment");
    CHECK(record.template_id == "EuBasicExpressed");
    CHECK(record.prefix_index.has_value());
  }

  SUBCASE("unparseable answer keeps the raw text and fails") {
    FixtureScript script;
    script.entries.push_back({FixtureEntry::MatchKind::Any, "", "I cannot tell"});
    FixtureBackend backend(std::move(script));
    Engine engine(forge(), backend, default_options());
    RunRecord record = engine.run_baseline(fx.item(Task::EuEvoked, Strategy::Basic));
    CHECK(record.status == RunStatus::ParseFailed);
    CHECK(!record.prediction.has_value());
    REQUIRE(record.raw.size() == 1);
    CHECK(record.raw[0].response == "I cannot tell");
  }

  SUBCASE("cot strategy selects the cot template") {
    FixtureScript script;
    script.entries.push_back({FixtureEntry::MatchKind::Any, "", "I select: awe"});
    FixtureBackend backend(std::move(script));
    Engine engine(forge(), backend, default_options());
    RunRecord record = engine.run_baseline(fx.item(Task::EuEvoked, Strategy::Cot));
    REQUIRE(record.status == RunStatus::Ok);
    CHECK(record.template_id == "EuCotEvoked");
    CHECK(!record.prefix_index.has_value());
  }

  SUBCASE("baseline ER keeps the raw generation") {
    FixtureScript script;
    script.entries.push_back({FixtureEntry::MatchKind::Template, "BaselineEr", "Because—"});
    FixtureBackend backend(std::move(script));
    Engine engine(forge(), backend, default_options());
    RunRecord record = engine.run_baseline(fx.item(Task::Er, Strategy::Basic, "fear"));
    REQUIRE(record.status == RunStatus::Ok);
    CHECK(record.prediction == "Because—");
    CHECK(record.template_id == "BaselineEr");
  }
}

TEST_CASE("run_batch keeps manifest order, isolates failures, and reruns identically") {
  EngineFixture fx;
  std::vector<EvalItem> manifest;
  for (int i = 0; i < 10; ++i) {
    EvalItem item = fx.item(Task::EuEvoked, Strategy::Basic);
    item.id = "item-" + std::to_string(i);
    if (i == 4) item.image_path = (fx.tmp / "missing.png").string();
    manifest.push_back(item);
  }
  REQUIRE(validate_manifest(manifest).ok());

  auto run_once = [&] {
    FixtureScript script;
    script.entries.push_back({FixtureEntry::MatchKind::Any, "", "awe"});
    FixtureBackend backend(std::move(script));
    EngineOptions options = default_options();
    options.parallelism = 4;
    Engine engine(forge(), backend, options);
    return engine.run_batch(manifest);
  };

  BatchResult batch = run_once();
  REQUIRE(batch.records.size() == 10);
  std::string serialized;
  for (std::size_t i = 0; i < batch.records.size(); ++i) {
    REQUIRE(batch.records[i].has_value());
    CHECK(batch.records[i]->item_id == "item-" + std::to_string(i));
    serialized += run_record_to_jsonl(*batch.records[i]) + "\n";
  }
  CHECK(batch.records[4]->status == RunStatus::BackendFailed);
  CHECK(batch.records[4]->error.find("ImageLoad") != std::string::npos);
  for (std::size_t i = 0; i < batch.records.size(); ++i) {
    if (i != 4) CHECK(batch.records[i]->status == RunStatus::Ok);
  }

  // Byte-identical rerun.
  BatchResult again = run_once();
  std::string serialized2;
  for (const auto& record : again.records) serialized2 += run_record_to_jsonl(*record) + "\n";
  CHECK(serialized == serialized2);
}

TEST_CASE("the seed only moves EU Basic prefix selection") {
  EngineFixture fx;
  std::vector<EvalItem> manifest;
  EvalItem basic = fx.item(Task::EuExpressed, Strategy::Basic);
  basic.id = "b";
  EvalItem cot = fx.item(Task::EuEvoked, Strategy::Cot);
  cot.id = "c";
  EvalItem gat = fx.item(Task::EuEvoked, Strategy::Gat);
  gat.id = "g";
  manifest = {basic, cot, gat};

  auto run_with_seed = [&](std::uint64_t seed) {
    FixtureScript script;
    script.entries.push_back({FixtureEntry::MatchKind::Template, "EuBasicExpressed", "awe"});
    script.entries.push_back({FixtureEntry::MatchKind::Template, "EuCotEvoked", "awe"});
    script.entries.push_back(
        {FixtureEntry::MatchKind::Template, "GatStage1", "Region 1: left\nRegion 2: right"});
    script.entries.push_back({FixtureEntry::MatchKind::Template, "GatPolarityProbe", "mixed"});
    script.entries.push_back({FixtureEntry::MatchKind::Template, "GatStage2",
                              stage2_three("awe", "fear", "anger")});
    script.entries.push_back({FixtureEntry::MatchKind::Template, "GatStage3", verdict(0.8)});
    FixtureBackend backend(std::move(script));
    EngineOptions options = default_options();
    options.seed = seed;
    options.parallelism = 1;
    Engine engine(forge(), backend, options);
    return engine.run_batch(manifest);
  };

  // Find two seeds that land on different prefixes for this item id.
  std::uint64_t other_seed = 1;
  while (forge().select_prefix(EuSubtype::Expressed, "b", other_seed) ==
         forge().select_prefix(EuSubtype::Expressed, "b", 0)) {
    ++other_seed;
  }
  BatchResult a = run_with_seed(0);
  BatchResult b = run_with_seed(other_seed);
  REQUIRE(a.records.size() == 3);
  REQUIRE(b.records.size() == 3);

  // EU Basic: prefix index (and thus the prompt) moves, the prediction does not.
  CHECK(a.records[0]->prefix_index != b.records[0]->prefix_index);
  CHECK(a.records[0]->raw[0].prompt_hash != b.records[0]->raw[0].prompt_hash);
  CHECK(a.records[0]->prediction == b.records[0]->prediction);
  // CoT and GAT runs are untouched by the seed.
  CHECK(run_record_to_jsonl(*a.records[1]) == run_record_to_jsonl(*b.records[1]));
  CHECK(run_record_to_jsonl(*a.records[2]) == run_record_to_jsonl(*b.records[2]));
}

TEST_CASE("manifest validation rejects duplicates and unknown labels") {
  EngineFixture fx;
  std::vector<EvalItem> manifest = {fx.item(Task::EuEvoked, Strategy::Basic),
                                    fx.item(Task::EuEvoked, Strategy::Basic)};
  auto dup = validate_manifest(manifest);
  REQUIRE(!dup.ok());
  CHECK(dup.error().message.find("item-1") != std::string::npos);

  std::vector<EvalItem> bad_label = {fx.item(Task::EuEvoked, Strategy::Basic, "happiness")};
  CHECK(!validate_manifest(bad_label).ok());
}

TEST_CASE("run records serialize to one-line JSON and read back") {
  RunRecord record;
  record.item_id = "x";
  record.strategy = Strategy::Gat;
  record.status = RunStatus::Ok;
  record.template_id = "GatStage1";
  record.prediction = "awe";
  record.raw.push_back(RawExchange{"GatStage1", prompt_hash("p"), "Region 1: sky"});

  const std::string line = run_record_to_jsonl(record);
  CHECK(line.find('\n') == std::string::npos);
  CHECK(line.rfind("{\"schema\":\"aica.run.v1\"", 0) == 0);
  auto parsed = run_record_from_jsonl(line);
  REQUIRE(parsed.ok());
  CHECK(parsed.value().item_id == "x");
  CHECK(parsed.value().prediction == "awe");
  CHECK(run_record_to_jsonl(parsed.value()) == line);
}
