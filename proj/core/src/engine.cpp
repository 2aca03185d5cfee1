#include "aica/engine.hpp"

#include <algorithm>
#include <mutex>
#include <thread>

#include "aica/hash.hpp"
#include "aica/scaffold.hpp"

namespace aica {

const char* to_string(Task task) noexcept {
  switch (task) {
    case Task::EuExpressed: return "EU_Expressed";
    case Task::EuEvoked: return "EU_Evoked";
    case Task::Er: return "ER";
    case Task::Egcg: return "EGCG";
  }
  return "?";
}

const char* to_string(Strategy strategy) noexcept {
  switch (strategy) {
    case Strategy::Basic: return "Basic";
    case Strategy::Cot: return "CoT";
    case Strategy::Gat: return "GAT";
  }
  return "?";
}

const char* to_string(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::Ok: return "Ok";
    case RunStatus::ParseFailed: return "ParseFailed";
    case RunStatus::BackendFailed: return "BackendFailed";
  }
  return "?";
}

std::optional<Task> task_from_string(std::string_view name) {
  for (Task t : {Task::EuExpressed, Task::EuEvoked, Task::Er, Task::Egcg}) {
    if (name == to_string(t)) return t;
  }
  return std::nullopt;
}

std::optional<Strategy> strategy_from_string(std::string_view name) {
  for (Strategy s : {Strategy::Basic, Strategy::Cot, Strategy::Gat}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

namespace {

bool is_eu(Task task) { return task == Task::EuExpressed || task == Task::EuEvoked; }

EuSubtype subtype_of(Task task) {
  return task == Task::EuExpressed ? EuSubtype::Expressed : EuSubtype::Evoked;
}

}  // namespace

Engine::Engine(const PromptForge& forge, Backend& backend, EngineOptions options)
    : forge_(forge), backend_(backend), options_(std::move(options)) {}

RunRecord Engine::run_item(const EvalItem& item) {
  if (item.strategy == Strategy::Gat) {
    return is_eu(item.task) ? run_affect_tot(item) : run_grounded_generation(item);
  }
  return run_baseline(item);
}

namespace {

struct CallContext {
  Backend& backend;
  RunRecord& record;
  const EngineOptions& options;

  // Sends one prompt and appends the exchange to the record's raw log.
  Result<std::string> send(const PromptBundle& bundle, const std::optional<RasterImage>& image) {
    CompletionRequest request;
    request.prompt = bundle.text;
    request.image = image;
    request.temperature = options.temperature;
    request.max_tokens = options.max_tokens;
    request.model_name = options.model_name;
    request.template_hint = to_string(bundle.template_id);
    auto result = backend.complete(request);
    if (!result.ok()) return result.error();
    record.raw.push_back(RawExchange{request.template_hint, prompt_hash(request.prompt),
                                     result.value().text});
    return std::move(result).take().text;
  }
};

RunRecord backend_failure(RunRecord record, const Error& error, const std::string& stage) {
  record.status = RunStatus::BackendFailed;
  record.error = stage + ": " + std::string(errc_name(error.code)) + ": " + error.message;
  return record;
}

RunRecord parse_failure(RunRecord record, const Error& error, const std::string& stage) {
  record.status = RunStatus::ParseFailed;
  record.error = stage + ": " + std::string(errc_name(error.code)) + ": " + error.message;
  return record;
}

}  // namespace

RunRecord Engine::run_affect_tot(const EvalItem& item) {
  RunRecord record;
  record.item_id = item.id;
  record.strategy = Strategy::Gat;
  record.template_id = to_string(PromptTemplateId::GatStage1);

  auto image = read_png(item.image_path);
  if (!image.ok()) {
    return backend_failure(std::move(record),
                           make_error(Errc::ImageLoad, image.error().message), "scaffold");
  }
  auto scaffold = build_scaffold(image.value(), options_.scaffold);
  if (!scaffold.ok()) {
    return backend_failure(std::move(record), scaffold.error(), "scaffold");
  }
  const ScaffoldedImage& scaffolded = scaffold.value();

  GatTrace trace;
  trace.item_id = item.id;
  trace.scaffold_params = options_.scaffold;
  trace.region_count = scaffolded.region_map.region_count();
  if (scaffolded.under_minimum) {
    trace.warnings.push_back("scaffold produced fewer regions than the configured minimum");
  }

  CallContext ctx{backend_, record, options_};
  const std::optional<RasterImage> overlay = scaffolded.overlay;

  // Stage 1: indexed region scan.
  auto stage1_text = ctx.send(forge_.gat_stage1(), overlay);
  if (!stage1_text.ok()) {
    return backend_failure(std::move(record), stage1_text.error(), "stage1");
  }
  auto regions = parse_stage1(stage1_text.value());
  if (!regions.ok()) {
    record.trace = std::move(trace);
    return parse_failure(std::move(record), regions.error(), "stage1");
  }
  trace.stage1 = regions.value();

  // Polarity probe feeding the branching stage.
  auto probe_text = ctx.send(forge_.gat_polarity_probe(), overlay);
  if (!probe_text.ok()) {
    return backend_failure(std::move(record), probe_text.error(), "polarity_probe");
  }
  PolarityParse polarity = parse_polarity(probe_text.value());
  if (!polarity.matched) {
    trace.warnings.push_back("polarity probe answer unrecognized; defaulted to mixed");
  }
  trace.polarity_estimate = to_string(polarity.polarity);

  // Stage 2: hypothesis branching.
  auto stage2_text =
      ctx.send(forge_.gat_stage2(trace.stage1, trace.polarity_estimate, item.taxonomy), overlay);
  if (!stage2_text.ok()) {
    return backend_failure(std::move(record), stage2_text.error(), "stage2");
  }
  auto stage2 = parse_stage2(stage2_text.value(), item.taxonomy);
  if (!stage2.ok()) {
    record.trace = std::move(trace);
    return parse_failure(std::move(record), stage2.error(), "stage2");
  }
  trace.hypotheses = stage2.value().hypotheses;
  for (const auto& warning : stage2.value().warnings) trace.warnings.push_back(warning);

  // Stage 3: grounded verification per hypothesis.
  for (std::size_t i = 0; i < trace.hypotheses.size(); ++i) {
    auto verdict_text = ctx.send(forge_.gat_stage3(trace.hypotheses[i], trace.stage1), overlay);
    if (!verdict_text.ok()) {
      return backend_failure(std::move(record), verdict_text.error(),
                             "stage3[" + std::to_string(i) + "]");
    }
    Stage3Parse verdict = parse_stage3(verdict_text.value());
    if (!verdict.score_found) {
      trace.warnings.push_back("stage3[" + std::to_string(i) +
                               "]: no score found; treated as 0.0 (pruned)");
    }
    trace.verdicts.push_back(verdict.verdict);
  }

  // Prune and select: argmax over surviving scores, lowest index on ties.
  for (std::size_t i = 0; i < trace.verdicts.size(); ++i) {
    if (trace.verdicts[i].score < options_.prune_threshold) {
      trace.pruned.insert(static_cast<int>(i));
    }
  }
  int best = -1;
  double best_score = -1.0;
  for (std::size_t i = 0; i < trace.verdicts.size(); ++i) {
    if (trace.pruned.contains(static_cast<int>(i))) continue;
    if (trace.verdicts[i].score > best_score) {
      best = static_cast<int>(i);
      best_score = trace.verdicts[i].score;
    }
  }
  if (best < 0) {
    // Single-pass design: never re-propose, fall back to the global argmax.
    trace.low_confidence = true;
    for (std::size_t i = 0; i < trace.verdicts.size(); ++i) {
      if (trace.verdicts[i].score > best_score) {
        best = static_cast<int>(i);
        best_score = trace.verdicts[i].score;
      }
    }
  }
  trace.chosen = best;
  trace.final_label = trace.hypotheses[static_cast<std::size_t>(best)].label.name;

  record.prediction = trace.final_label;
  record.trace = std::move(trace);
  record.status = RunStatus::Ok;
  return record;
}

RunRecord Engine::run_grounded_generation(const EvalItem& item) {
  RunRecord record;
  record.item_id = item.id;
  record.strategy = Strategy::Gat;

  auto image = read_png(item.image_path);
  if (!image.ok()) {
    return backend_failure(std::move(record),
                           make_error(Errc::ImageLoad, image.error().message), "scaffold");
  }
  auto scaffold = build_scaffold(image.value(), options_.scaffold);
  if (!scaffold.ok()) {
    return backend_failure(std::move(record), scaffold.error(), "scaffold");
  }

  EmotionLabel label{item.label, item.taxonomy};
  PromptBundle bundle =
      item.task == Task::Er ? forge_.gat_er() : forge_.gat_egcg(label);
  record.template_id = to_string(bundle.template_id);

  CallContext ctx{backend_, record, options_};
  auto text = ctx.send(bundle, scaffold.value().overlay);
  if (!text.ok()) {
    return backend_failure(std::move(record), text.error(), "generation");
  }
  record.prediction = std::move(text).take();
  record.status = RunStatus::Ok;
  return record;
}

RunRecord Engine::run_baseline(const EvalItem& item) {
  RunRecord record;
  record.item_id = item.id;
  record.strategy = item.strategy;

  auto image = read_png(item.image_path);
  if (!image.ok()) {
    return backend_failure(std::move(record),
                           make_error(Errc::ImageLoad, image.error().message), "image");
  }

  PromptBundle bundle = [&] {
    EmotionLabel label{item.label, item.taxonomy};
    if (is_eu(item.task)) {
      EuSubtype subtype = subtype_of(item.task);
      if (item.strategy == Strategy::Cot) return forge_.eu_cot(subtype, item.taxonomy);
      int prefix_index = forge_.select_prefix(subtype, item.id, options_.seed);
      return forge_.eu_basic(subtype, prefix_index, item.taxonomy);
    }
    return item.task == Task::Er ? forge_.baseline_er(label) : forge_.baseline_egcg(label);
  }();
  record.template_id = to_string(bundle.template_id);
  record.prefix_index = bundle.prefix_index;

  CallContext ctx{backend_, record, options_};
  auto text = ctx.send(bundle, image.value());
  if (!text.ok()) {
    return backend_failure(std::move(record), text.error(), "completion");
  }

  if (is_eu(item.task)) {
    auto label = parse_label(text.value(), item.taxonomy);
    if (!label.ok()) {
      return parse_failure(std::move(record), label.error(), "answer");
    }
    record.prediction = label.value().name;
  } else {
    record.prediction = text.value();
  }
  record.status = RunStatus::Ok;
  return record;
}

BatchResult Engine::run_batch(const std::vector<EvalItem>& manifest, const ProgressFn& progress,
                              const std::atomic<bool>* cancel) {
  BatchResult result;
  result.records.resize(manifest.size());
  if (manifest.empty()) return result;

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  const int workers =
      std::max(1, std::min<int>(options_.parallelism, static_cast<int>(manifest.size())));
  auto worker = [&] {
    while (true) {
      if (cancel != nullptr && cancel->load()) return;
      std::size_t i = next.fetch_add(1);
      if (i >= manifest.size()) return;
      RunRecord record;
      try {
        record = run_item(manifest[i]);
      } catch (const std::exception& e) {
        record.item_id = manifest[i].id;
        record.strategy = manifest[i].strategy;
        record.status = RunStatus::BackendFailed;
        record.error = std::string("internal: ") + e.what();
      }
      {
        std::lock_guard<std::mutex> lock(progress_mutex);
        result.records[i] = std::move(record);
        std::size_t completed = done.fetch_add(1) + 1;
        if (progress) progress(completed, manifest.size(), *result.records[i]);
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  result.cancelled = cancel != nullptr && cancel->load();
  return result;
}

}  // namespace aica
