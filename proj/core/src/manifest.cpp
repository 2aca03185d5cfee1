#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aica/engine.hpp"

namespace aica {

namespace {

constexpr const char* kManifestSchema = "aica.manifest.v1";
constexpr const char* kRunSchema = "aica.run.v1";
constexpr const char* kJudgeSchema = "aica.judge.v1";

nlohmann::ordered_json hypothesis_to_json(const Hypothesis& h) {
  nlohmann::ordered_json j;
  j["index"] = h.index;
  j["label"] = h.label.name;
  j["intensity"] = to_string(h.intensity);
  j["evidence"] = h.evidence;
  j["cited_regions"] = h.cited_regions;
  return j;
}

nlohmann::ordered_json trace_to_json(const GatTrace& t) {
  nlohmann::ordered_json j;
  j["item_id"] = t.item_id;
  j["scaffold_params"] = {{"scale", t.scaffold_params.scale},
                          {"sigma", t.scaffold_params.sigma},
                          {"min_size_ratio", t.scaffold_params.min_size_ratio},
                          {"min_regions", t.scaffold_params.min_regions},
                          {"max_regions", t.scaffold_params.max_regions}};
  j["region_count"] = t.region_count;
  nlohmann::ordered_json stage1;
  for (const auto& [id, desc] : t.stage1) stage1[std::to_string(id)] = desc;
  j["stage1"] = std::move(stage1);
  j["polarity_estimate"] = t.polarity_estimate;
  nlohmann::ordered_json hyps = nlohmann::ordered_json::array();
  for (const auto& h : t.hypotheses) hyps.push_back(hypothesis_to_json(h));
  j["hypotheses"] = std::move(hyps);
  nlohmann::ordered_json verdicts = nlohmann::ordered_json::array();
  for (const auto& v : t.verdicts) {
    verdicts.push_back({{"score", v.score}, {"critique", v.critique}});
  }
  j["verdicts"] = std::move(verdicts);
  j["pruned"] = t.pruned;
  j["chosen"] = t.chosen;
  j["final_label"] = t.final_label;
  j["low_confidence"] = t.low_confidence;
  j["warnings"] = t.warnings;
  return j;
}

Result<GatTrace> trace_from_json(const nlohmann::json& j, TaxonomyId taxonomy) {
  GatTrace t;
  try {
    t.item_id = j.value("item_id", "");
    const auto& p = j.at("scaffold_params");
    t.scaffold_params.scale = p.at("scale").get<double>();
    t.scaffold_params.sigma = p.at("sigma").get<double>();
    t.scaffold_params.min_size_ratio = p.at("min_size_ratio").get<double>();
    t.scaffold_params.min_regions = p.at("min_regions").get<int>();
    t.scaffold_params.max_regions = p.at("max_regions").get<int>();
    t.region_count = j.at("region_count").get<int>();
    for (const auto& [key, value] : j.at("stage1").items()) {
      t.stage1[std::stoi(key)] = value.get<std::string>();
    }
    t.polarity_estimate = j.at("polarity_estimate").get<std::string>();
    for (const auto& h : j.at("hypotheses")) {
      Hypothesis hyp;
      hyp.index = h.at("index").get<int>();
      hyp.label = EmotionLabel{h.at("label").get<std::string>(), taxonomy};
      const std::string intensity = h.at("intensity").get<std::string>();
      hyp.intensity = intensity == "Low"    ? IntensityLevel::Low
                      : intensity == "High" ? IntensityLevel::High
                                            : IntensityLevel::Medium;
      hyp.evidence = h.at("evidence").get<std::string>();
      for (const auto& r : h.at("cited_regions")) hyp.cited_regions.insert(r.get<int>());
      t.hypotheses.push_back(std::move(hyp));
    }
    for (const auto& v : j.at("verdicts")) {
      t.verdicts.push_back(Verdict{v.at("score").get<double>(),
                                   v.at("critique").get<std::string>()});
    }
    for (const auto& p2 : j.at("pruned")) t.pruned.insert(p2.get<int>());
    t.chosen = j.at("chosen").get<int>();
    t.final_label = j.at("final_label").get<std::string>();
    t.low_confidence = j.at("low_confidence").get<bool>();
    t.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const std::exception& e) {
    return make_error(Errc::InvalidManifest, std::string("bad trace: ") + e.what());
  }
  return t;
}

}  // namespace

Result<EvalItem> manifest_line_to_item(std::string_view line, std::size_t line_number) {
  auto fail = [&](const std::string& what) {
    return make_error(Errc::InvalidManifest,
                      "line " + std::to_string(line_number) + ": " + what);
  };
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return fail("not a JSON object");
  if (j.value("schema", "") != kManifestSchema) {
    return fail("schema field must be \"" + std::string(kManifestSchema) + "\"");
  }
  EvalItem item;
  for (const char* field : {"id", "image", "task", "strategy", "taxonomy", "label"}) {
    if (!j.contains(field) || !j[field].is_string()) {
      return fail(std::string("missing string field: ") + field);
    }
  }
  item.id = j["id"].get<std::string>();
  item.image_path = j["image"].get<std::string>();
  auto task = task_from_string(j["task"].get<std::string>());
  if (!task) return fail("unknown task: " + j["task"].get<std::string>());
  item.task = *task;
  auto strategy = strategy_from_string(j["strategy"].get<std::string>());
  if (!strategy) return fail("unknown strategy: " + j["strategy"].get<std::string>());
  item.strategy = *strategy;
  auto taxonomy = taxonomy_from_string(j["taxonomy"].get<std::string>());
  if (!taxonomy) return fail("unknown taxonomy: " + j["taxonomy"].get<std::string>());
  item.taxonomy = *taxonomy;
  item.label = j["label"].get<std::string>();
  const auto& labels = label_space(item.taxonomy);
  bool known = false;
  for (const auto& l : labels) known = known || l.name == item.label;
  if (!known) {
    return fail("label \"" + item.label + "\" not in " + to_string(item.taxonomy));
  }
  return item;
}

Result<std::vector<EvalItem>> read_manifest_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return make_error(Errc::IoError, "cannot open manifest: " + path.string());
  std::vector<EvalItem> items;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    auto item = manifest_line_to_item(line, line_number);
    if (!item.ok()) return item.error();
    items.push_back(std::move(item).take());
  }
  auto valid = validate_manifest(items);
  if (!valid.ok()) return valid.error();
  return items;
}

Status validate_manifest(const std::vector<EvalItem>& items) {
  std::set<std::string> seen;
  for (const auto& item : items) {
    if (!seen.insert(item.id).second) {
      return make_error(Errc::InvalidManifest, "duplicate item id: " + item.id);
    }
    const auto& labels = label_space(item.taxonomy);
    bool known = false;
    for (const auto& l : labels) known = known || l.name == item.label;
    if (!known) {
      return make_error(Errc::InvalidManifest,
                        "item " + item.id + ": label \"" + item.label + "\" not in " +
                            to_string(item.taxonomy));
    }
  }
  return ok_status();
}

std::string run_record_to_jsonl(const RunRecord& record) {
  nlohmann::ordered_json j;
  j["schema"] = kRunSchema;
  j["item_id"] = record.item_id;
  j["strategy"] = to_string(record.strategy);
  j["status"] = to_string(record.status);
  j["template"] = record.template_id;
  if (record.prefix_index.has_value()) j["prefix_index"] = *record.prefix_index;
  if (record.prediction.has_value()) j["prediction"] = *record.prediction;
  if (!record.error.empty()) j["error"] = record.error;
  nlohmann::ordered_json raw = nlohmann::ordered_json::array();
  for (const auto& exchange : record.raw) {
    raw.push_back({{"template", exchange.template_id},
                   {"prompt_hash", exchange.prompt_hash},
                   {"response", exchange.response}});
  }
  j["raw"] = std::move(raw);
  if (record.trace.has_value()) j["trace"] = trace_to_json(*record.trace);
  return j.dump();
}

Result<RunRecord> run_record_from_jsonl(std::string_view line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return make_error(Errc::InvalidManifest, "run record is not a JSON object");
  }
  if (j.value("schema", "") != kRunSchema) {
    return make_error(Errc::InvalidManifest, "run record schema mismatch");
  }
  RunRecord record;
  try {
    record.item_id = j.at("item_id").get<std::string>();
    auto strategy = strategy_from_string(j.at("strategy").get<std::string>());
    if (!strategy) return make_error(Errc::InvalidManifest, "unknown strategy");
    record.strategy = *strategy;
    const std::string status = j.at("status").get<std::string>();
    record.status = status == "Ok"            ? RunStatus::Ok
                    : status == "ParseFailed" ? RunStatus::ParseFailed
                                              : RunStatus::BackendFailed;
    record.template_id = j.value("template", "");
    if (j.contains("prefix_index")) record.prefix_index = j["prefix_index"].get<int>();
    if (j.contains("prediction")) record.prediction = j["prediction"].get<std::string>();
    record.error = j.value("error", "");
    if (j.contains("raw")) {
      for (const auto& e : j["raw"]) {
        record.raw.push_back(RawExchange{e.value("template", ""), e.value("prompt_hash", ""),
                                         e.value("response", "")});
      }
    }
    // Traces are replayed lazily by consumers; keep the taxonomy-free parts.
    if (j.contains("trace")) {
      auto trace = trace_from_json(j["trace"], TaxonomyId::Mikels8);
      if (trace.ok()) record.trace = std::move(trace).take();
    }
  } catch (const std::exception& e) {
    return make_error(Errc::InvalidManifest, std::string("bad run record: ") + e.what());
  }
  return record;
}

Status write_run_jsonl(const std::vector<RunRecord>& records,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return make_error(Errc::IoError, "cannot open " + path.string() + " for writing");
  for (const auto& record : records) {
    out << run_record_to_jsonl(record) << '\n';
  }
  out.flush();
  if (!out) return make_error(Errc::IoError, "write failed: " + path.string());
  return ok_status();
}

Result<std::vector<RunRecord>> read_run_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return make_error(Errc::IoError, "cannot open runs: " + path.string());
  std::vector<RunRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto record = run_record_from_jsonl(line);
    if (!record.ok()) return record.error();
    records.push_back(std::move(record).take());
  }
  return records;
}

Result<std::vector<JudgeScoreLine>> read_judge_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return make_error(Errc::IoError, "cannot open judge scores: " + path.string());
  std::vector<JudgeScoreLine> lines;
  std::string text;
  std::size_t line_number = 0;
  while (std::getline(in, text)) {
    ++line_number;
    if (text.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object() || j.value("schema", "") != kJudgeSchema ||
        !j.contains("item_id") || !j.contains("scores") || !j["scores"].is_object()) {
      return make_error(Errc::InvalidManifest,
                        "judge line " + std::to_string(line_number) + " malformed");
    }
    JudgeScoreLine line;
    line.item_id = j["item_id"].get<std::string>();
    for (const auto& [key, value] : j["scores"].items()) {
      if (!value.is_number_integer()) {
        return make_error(Errc::InvalidManifest,
                          "judge line " + std::to_string(line_number) +
                              ": score " + key + " is not an integer");
      }
      line.scores[key] = value.get<int>();
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace aica
