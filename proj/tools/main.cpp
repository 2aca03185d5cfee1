#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <algorithm>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "aica/config.hpp"
#include "aica/engine.hpp"
#include "aica/metrics.hpp"
#include "aica/report.hpp"
#include "aica/scaffold.hpp"

namespace {

namespace fs = std::filesystem;
using namespace aica;

// Stable public exit codes (documented in README).
constexpr int kExitOk = 0;
constexpr int kExitBadArgs = 2;
constexpr int kExitIo = 3;
constexpr int kExitProcessing = 4;
constexpr int kExitBackendConfig = 5;
constexpr int kExitIdMismatch = 6;
constexpr int kExitInterrupted = 130;

std::atomic<bool> g_cancel{false};

void handle_sigint(int) { g_cancel.store(true); }

fs::path default_assets_dir() {
#ifdef AICA_DEFAULT_ASSETS_DIR
  fs::path source_assets(AICA_DEFAULT_ASSETS_DIR);
  if (fs::exists(source_assets)) return source_assets;
#endif
  // Installed layout: <prefix>/bin/aica next to <prefix>/share/aica/assets.
  std::error_code ec;
  fs::path exe = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    fs::path installed = exe.parent_path().parent_path() / "share" / "aica" / "assets";
    if (fs::exists(installed)) return installed;
  }
  return fs::path("assets");
}

fs::path resolve_assets_dir(const AppConfig& config) {
  if (!config.paths.assets_dir.empty()) return fs::path(config.paths.assets_dir);
  return default_assets_dir();
}

int cmd_scaffold(const std::string& in_path, const std::string& out_path,
                 const SegmentationParams& params, const std::string& dump_regions) {
  if (!params.valid()) {
    std::cerr << "invalid segmentation parameters\n";
    return kExitBadArgs;
  }
  auto img = read_png(in_path);
  if (!img.ok()) {
    std::cerr << "cannot read " << in_path << ": " << img.error().message << "\n";
    return kExitIo;
  }
  auto scaffold = build_scaffold(img.value(), params);
  if (!scaffold.ok()) {
    std::cerr << "scaffolding failed: " << scaffold.error().message << "\n";
    return kExitProcessing;
  }
  if (scaffold.value().under_minimum) {
    std::cerr << "warning: segmentation produced fewer regions than the configured minimum\n";
  }
  auto written = write_png(scaffold.value().overlay, out_path);
  if (!written.ok()) {
    std::cerr << written.error().message << "\n";
    return kExitIo;
  }
  if (!dump_regions.empty()) {
    std::ofstream out(dump_regions, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << dump_regions << "\n";
      return kExitIo;
    }
    out << region_map_json(scaffold.value().region_map) << "\n";
  }
  std::cerr << "wrote " << out_path << " (" << scaffold.value().region_map.region_count()
            << " regions)\n";
  return kExitOk;
}

std::unique_ptr<Backend> make_backend(const AppConfig& config, const fs::path& config_dir,
                                      std::string* error, bool* sequential_script) {
  if (config.backend.kind == "fixture") {
    if (config.backend.script_path.empty()) {
      *error = "backend.kind is \"fixture\" but script_path is empty";
      return nullptr;
    }
    fs::path script_path = fs::path(config.backend.script_path);
    if (script_path.is_relative()) script_path = config_dir / script_path;
    auto script = FixtureScript::load(script_path);
    if (!script.ok()) {
      *error = script.error().message;
      return nullptr;
    }
    *sequential_script = script.value().mode == FixtureScript::Mode::Sequential;
    return std::make_unique<FixtureBackend>(std::move(script).take());
  }
  if (config.backend.endpoint.empty()) {
    *error = "backend.kind is \"http\" but endpoint is empty";
    return nullptr;
  }
  HttpBackendOptions options;
  options.endpoint = config.backend.endpoint;
  options.api_key = resolve_api_key(config.backend);
  options.model_name = config.backend.model_name;
  options.timeout = std::chrono::milliseconds(config.backend.timeout_ms);
  return std::make_unique<HttpBackend>(std::move(options));
}

int cmd_run(const std::string& manifest_path, const std::string& config_path,
            const std::string& out_path) {
  auto config = AppConfig::load(config_path);
  if (!config.ok()) {
    std::cerr << "config error: " << config.error().message << "\n";
    return kExitBackendConfig;
  }
  auto manifest = read_manifest_jsonl(manifest_path);
  if (!manifest.ok()) {
    std::cerr << "manifest error: " << manifest.error().message << "\n";
    return kExitBadArgs;
  }

  // Image paths resolve relative to the manifest location.
  const fs::path manifest_dir = fs::path(manifest_path).parent_path();
  std::vector<EvalItem> items = std::move(manifest).take();
  for (auto& item : items) {
    fs::path p(item.image_path);
    if (p.is_relative()) item.image_path = (manifest_dir / p).string();
  }

  std::string backend_error;
  bool sequential_script = false;
  auto backend = make_backend(config.value(), fs::path(config_path).parent_path(),
                              &backend_error, &sequential_script);
  if (backend == nullptr) {
    std::cerr << "backend config error: " << backend_error << "\n";
    return kExitBackendConfig;
  }

  PromptForge forge = [&] {
    try {
      return PromptForge::load(resolve_assets_dir(config.value()));
    } catch (const std::exception& e) {
      std::cerr << "assets error: " << e.what() << "\n";
      std::exit(kExitBackendConfig);
    }
  }();

  EngineOptions options;
  options.scaffold = config.value().scaffold;
  options.prune_threshold = config.value().run.prune_threshold;
  options.seed = config.value().run.seed;
  // Workers are synchronous, so the worker count bounds in-flight requests.
  options.parallelism =
      std::min(config.value().run.parallelism, config.value().backend.max_in_flight);
  options.model_name = config.value().backend.model_name;

  // Sequential fixture scripts consume entries in call order; run them on a
  // single worker so reruns stay byte-identical.
  if (sequential_script) options.parallelism = 1;

  std::signal(SIGINT, handle_sigint);
  Engine engine(forge, *backend, options);
  BatchResult batch = engine.run_batch(
      items,
      [&](std::size_t done, std::size_t total, const RunRecord& record) {
        std::cerr << "[" << done << "/" << total << "] " << record.item_id << " "
                  << to_string(record.status) << "\n";
      },
      &g_cancel);

  std::vector<RunRecord> completed;
  for (auto& record : batch.records) {
    if (record.has_value()) completed.push_back(std::move(*record));
  }
  auto written = write_run_jsonl(completed, out_path);
  if (!written.ok()) {
    std::cerr << written.error().message << "\n";
    return kExitIo;
  }

  std::size_t ok = 0;
  std::size_t parse_failed = 0;
  std::size_t backend_failed = 0;
  for (const auto& record : completed) {
    switch (record.status) {
      case RunStatus::Ok: ++ok; break;
      case RunStatus::ParseFailed: ++parse_failed; break;
      case RunStatus::BackendFailed: ++backend_failed; break;
    }
  }
  std::cout << "{\"items\":" << completed.size() << ",\"ok\":" << ok
            << ",\"parse_failed\":" << parse_failed
            << ",\"backend_failed\":" << backend_failed << "}\n";
  return batch.cancelled ? kExitInterrupted : kExitOk;
}

int cmd_score(const std::string& runs_path, const std::string& manifest_path,
              const std::string& judge_path, const std::string& out_path) {
  auto manifest = read_manifest_jsonl(manifest_path);
  if (!manifest.ok()) {
    std::cerr << "manifest error: " << manifest.error().message << "\n";
    return kExitBadArgs;
  }
  auto runs = read_run_jsonl(runs_path);
  if (!runs.ok()) {
    std::cerr << "runs error: " << runs.error().message << "\n";
    return kExitBadArgs;
  }

  std::map<std::string, EvalItem> by_id;
  for (const auto& item : manifest.value()) by_id[item.id] = item;

  // EU confusion counts: pooled plus per-strategy, one taxonomy per run set.
  std::optional<TaxonomyId> eu_taxonomy;
  std::optional<ConfusionCounts> eu_all;
  std::optional<ConfusionCounts> eu_basic_counts;
  std::optional<ConfusionCounts> eu_cot_counts;

  for (const auto& record : runs.value()) {
    auto it = by_id.find(record.item_id);
    if (it == by_id.end()) {
      std::cerr << "run references unknown item id: " << record.item_id << "\n";
      return kExitIdMismatch;
    }
    const EvalItem& item = it->second;
    const bool eu = item.task == Task::EuExpressed || item.task == Task::EuEvoked;
    if (!eu) continue;

    if (!eu_taxonomy.has_value()) {
      eu_taxonomy = item.taxonomy;
      eu_all.emplace(item.taxonomy);
      eu_basic_counts.emplace(item.taxonomy);
      eu_cot_counts.emplace(item.taxonomy);
    } else if (*eu_taxonomy != item.taxonomy) {
      std::cerr << "EU items mix taxonomies (" << to_string(*eu_taxonomy) << " vs "
                << to_string(item.taxonomy) << "); score them in separate runs\n";
      return kExitBadArgs;
    }

    ConfusionCounts* strategy_counts = nullptr;
    if (record.strategy == Strategy::Basic) strategy_counts = &*eu_basic_counts;
    if (record.strategy == Strategy::Cot) strategy_counts = &*eu_cot_counts;

    EmotionLabel gold{item.label, item.taxonomy};
    bool parsed = false;
    if (record.status == RunStatus::Ok && record.prediction.has_value()) {
      auto pred = parse_label(*record.prediction, item.taxonomy);
      if (pred.ok()) {
        (void)eu_all->add(gold, pred.value());
        if (strategy_counts != nullptr) (void)strategy_counts->add(gold, pred.value());
        parsed = true;
      }
    }
    if (!parsed) {
      eu_all->add_unparsed();
      if (strategy_counts != nullptr) strategy_counts->add_unparsed();
    }
  }

  EvalReport report;
  if (eu_all.has_value() && eu_all->total() > 0) {
    EuSection eu;
    eu.accuracy = accuracy(*eu_all).value();
    eu.macro_f1 = macro_f1(*eu_all).value();
    eu.weighted_f1 = weighted_f1(*eu_all).value();
    eu.items = eu_all->total();
    eu.unparsed = eu_all->unparsed;
    report.eu = eu;
    report.errors = error_taxonomy(*eu_all);
    if (eu_basic_counts->total() > 0) {
      report.eu_basic = weighted_f1(*eu_basic_counts).value() * 100.0;
    }
    if (eu_cot_counts->total() > 0) {
      report.eu_cot = weighted_f1(*eu_cot_counts).value() * 100.0;
    }
  }

  if (!judge_path.empty()) {
    auto judge_lines = read_judge_jsonl(judge_path);
    if (!judge_lines.ok()) {
      std::cerr << "judge scores error: " << judge_lines.error().message << "\n";
      return kExitBadArgs;
    }
    CriterionScores er_scores;
    er_scores.task = JudgeTask::Er;
    CriterionScores egcg_scores;
    egcg_scores.task = JudgeTask::Egcg;
    for (const auto& line : judge_lines.value()) {
      auto it = by_id.find(line.item_id);
      if (it == by_id.end()) {
        std::cerr << "judge scores reference unknown item id: " << line.item_id << "\n";
        return kExitIdMismatch;
      }
      if (it->second.task == Task::Er) {
        er_scores.per_item[line.item_id] = line.scores;
      } else if (it->second.task == Task::Egcg) {
        egcg_scores.per_item[line.item_id] = line.scores;
      } else {
        std::cerr << "judge scores for non-generation item: " << line.item_id << "\n";
        return kExitBadArgs;
      }
    }
    if (!er_scores.per_item.empty()) {
      auto agg = aggregate_criteria(er_scores);
      if (!agg.ok()) {
        std::cerr << "ER judge scores invalid: " << agg.error().message << "\n";
        return kExitBadArgs;
      }
      report.criterion_pcts["er"] = agg.value().criterion_pcts;
      report.er_avg = agg.value().task_avg;
    }
    if (!egcg_scores.per_item.empty()) {
      auto agg = aggregate_criteria(egcg_scores);
      if (!agg.ok()) {
        std::cerr << "EGCG judge scores invalid: " << agg.error().message << "\n";
        return kExitBadArgs;
      }
      report.criterion_pcts["egcg"] = agg.value().criterion_pcts;
      report.eg_avg = agg.value().task_avg;
    }
  }

  if (report.eu_basic && report.eu_cot && report.er_avg && report.eg_avg) {
    auto averages =
        compose_leaderboard(*report.eu_basic, *report.eu_cot, *report.er_avg, *report.eg_avg);
    report.eu_avg = averages.eu_avg;
    report.overall_avg = averages.overall_avg;
  }

  auto written = write_report(report, out_path);
  if (!written.ok()) {
    std::cerr << written.error().message << "\n";
    return kExitIo;
  }
  std::cerr << "wrote " << out_path << "\n";
  return kExitOk;
}

int cmd_report(const std::string& report_path, const std::string& format) {
  auto report = read_report(report_path);
  if (!report.ok()) {
    std::cerr << "cannot read report: " << report.error().message << "\n";
    return kExitIo;
  }
  if (format == "json") {
    std::cout << report_to_json(report.value());
  } else {
    std::cout << report_table(report.value());
  }
  return kExitOk;
}

void print_bundle(const PromptBundle& bundle) {
  std::cout << "=== " << to_string(bundle.template_id) << " ===\n" << bundle.text << "\n";
}

int cmd_gen_prompts(const std::string& task, const std::string& taxonomy_name,
                    const std::string& emotion, const std::string& subtype_name,
                    std::optional<std::uint64_t> seed, int prefix_index,
                    const std::string& assets_dir) {
  auto taxonomy = taxonomy_from_string(taxonomy_name);
  if (!taxonomy) {
    std::cerr << "unknown taxonomy: " << taxonomy_name << "\n";
    return kExitBadArgs;
  }
  EuSubtype subtype;
  if (subtype_name == "expressed") {
    subtype = EuSubtype::Expressed;
  } else if (subtype_name == "evoked") {
    subtype = EuSubtype::Evoked;
  } else {
    std::cerr << "unknown subtype: " << subtype_name << "\n";
    return kExitBadArgs;
  }

  std::optional<EmotionLabel> label;
  if (!emotion.empty()) {
    bool known = false;
    for (const auto& l : label_space(*taxonomy)) known = known || l.name == emotion;
    if (!known) {
      std::cerr << "label \"" << emotion << "\" not in " << to_string(*taxonomy) << "\n";
      return kExitBadArgs;
    }
    label = EmotionLabel{emotion, *taxonomy};
  }

  PromptForge forge = [&] {
    try {
      return PromptForge::load(assets_dir.empty() ? default_assets_dir() : fs::path(assets_dir));
    } catch (const std::exception& e) {
      std::cerr << "assets error: " << e.what() << "\n";
      std::exit(kExitIo);
    }
  }();

  // Deterministic sample inputs for templates that need runtime values.
  const std::map<int, std::string> sample_regions = {
      {1, "[Description of Region 1]"}, {2, "[Description of Region 2]"}};

  if (task == "eu-basic") {
    int index = prefix_index;
    if (seed.has_value()) index = forge.select_prefix(subtype, "gen-prompts", *seed);
    if (index < 0 || static_cast<std::size_t>(index) >= forge.prefix_count(subtype)) {
      std::cerr << "prefix index out of range\n";
      return kExitBadArgs;
    }
    print_bundle(forge.eu_basic(subtype, index, *taxonomy));
  } else if (task == "eu-cot") {
    print_bundle(forge.eu_cot(subtype, *taxonomy));
  } else if (task == "gat") {
    print_bundle(forge.gat_stage1());
    print_bundle(forge.gat_polarity_probe());
    print_bundle(forge.gat_stage2(sample_regions, "mixed", *taxonomy));
    Hypothesis sample;
    sample.index = 0;
    sample.label = label_space(*taxonomy).front();
    sample.intensity = IntensityLevel::Medium;
    print_bundle(forge.gat_stage3(sample, sample_regions));
  } else if (task == "er") {
    print_bundle(forge.gat_er());
  } else if (task == "egcg") {
    if (!label) {
      std::cerr << "--emotion is required for egcg\n";
      return kExitBadArgs;
    }
    print_bundle(forge.gat_egcg(*label));
  } else if (task == "instruction-gen") {
    if (!label) {
      std::cerr << "--emotion is required for instruction-gen\n";
      return kExitBadArgs;
    }
    print_bundle(forge.instruction_gen(*label));
  } else if (task == "judge") {
    print_bundle(forge.judge(JudgeTask::Er, "(question text)", "(answer text)"));
    print_bundle(forge.judge(JudgeTask::Egcg, "(instruction text)", "(answer text)"));
  } else {
    std::cerr << "unknown task: " << task << "\n";
    return kExitBadArgs;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aica: grounded affective prompting and benchmark scoring toolkit"};
  app.require_subcommand(1);

  // scaffold
  auto* scaffold = app.add_subcommand("scaffold", "Segment an image and write the region overlay");
  std::string in_path;
  std::string out_path;
  std::string dump_regions;
  SegmentationParams params;
  scaffold->add_option("--in", in_path, "Input PNG")->required();
  scaffold->add_option("--out", out_path, "Output overlay PNG")->required();
  scaffold->add_option("--scale", params.scale, "Segmentation threshold constant")
      ->capture_default_str();
  scaffold->add_option("--sigma", params.sigma, "Gaussian pre-smoothing std-dev")
      ->capture_default_str();
  scaffold->add_option("--min-size-ratio", params.min_size_ratio,
                       "Minimum component size as a fraction of total pixels")
      ->capture_default_str();
  scaffold->add_option("--min-regions", params.min_regions, "Target region count lower bound")
      ->capture_default_str();
  scaffold->add_option("--max-regions", params.max_regions, "Target region count upper bound")
      ->capture_default_str();
  scaffold->add_option("--dump-regions", dump_regions, "Write the region map as JSON");

  // run
  auto* run = app.add_subcommand("run", "Run a manifest through the configured backend");
  std::string manifest_path;
  std::string config_path;
  std::string run_out;
  run->add_option("--manifest", manifest_path, "Manifest JSONL")->required();
  run->add_option("--config", config_path, "Config JSON")->required();
  run->add_option("--out", run_out, "Output run JSONL")->required();

  // score
  auto* score = app.add_subcommand("score", "Compute the evaluation report from run records");
  std::string runs_path;
  std::string score_manifest;
  std::string judge_path;
  std::string report_out;
  score->add_option("--runs", runs_path, "Run JSONL")->required();
  score->add_option("--manifest", score_manifest, "Manifest JSONL with gold labels")->required();
  score->add_option("--judge-scores", judge_path, "Judge scores JSONL for ER/EGCG");
  score->add_option("--out", report_out, "Output report JSON")->required();

  // report
  auto* report = app.add_subcommand("report", "Print a report as a table or JSON");
  std::string report_path;
  std::string format = "table";
  report->add_option("--report", report_path, "Report JSON")->required();
  report->add_option("--format", format, "Output format: table or json")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();

  // gen-prompts
  auto* gen = app.add_subcommand("gen-prompts", "Render prompt templates to stdout");
  std::string task;
  std::string taxonomy_name = "Mikels8";
  std::string emotion;
  std::string subtype_name = "expressed";
  std::optional<std::uint64_t> seed;
  int prefix_index = 0;
  std::string assets_dir;
  gen->add_option("--task", task, "eu-basic|eu-cot|gat|er|egcg|judge|instruction-gen")
      ->required();
  gen->add_option("--taxonomy", taxonomy_name, "Taxonomy id")->capture_default_str();
  gen->add_option("--emotion", emotion, "Emotion label (egcg, instruction-gen)");
  gen->add_option("--subtype", subtype_name, "expressed or evoked")->capture_default_str();
  gen->add_option("--seed", seed, "Derive the prefix index from this seed");
  gen->add_option("--prefix-index", prefix_index, "Explicit prefix index")
      ->capture_default_str();
  gen->add_option("--assets-dir", assets_dir, "Override the assets directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitBadArgs;
  }

  if (scaffold->parsed()) return cmd_scaffold(in_path, out_path, params, dump_regions);
  if (run->parsed()) return cmd_run(manifest_path, config_path, run_out);
  if (score->parsed()) return cmd_score(runs_path, score_manifest, judge_path, report_out);
  if (report->parsed()) return cmd_report(report_path, format);
  if (gen->parsed()) {
    return cmd_gen_prompts(task, taxonomy_name, emotion, subtype_name, seed, prefix_index,
                           assets_dir);
  }
  return kExitBadArgs;
}
