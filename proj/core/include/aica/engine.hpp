#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aica/backend.hpp"
#include "aica/parsers.hpp"
#include "aica/prompts.hpp"
#include "aica/segmentation.hpp"
#include "aica/taxonomy.hpp"

namespace aica {

enum class Task { EuExpressed, EuEvoked, Er, Egcg };
enum class Strategy { Basic, Cot, Gat };
const char* to_string(Task task) noexcept;
const char* to_string(Strategy strategy) noexcept;
std::optional<Task> task_from_string(std::string_view name);
std::optional<Strategy> strategy_from_string(std::string_view name);

struct EvalItem {
  std::string id;
  std::string image_path;
  std::string label;  // gold label (EU), explained emotion (ER), target (EGCG)
  TaxonomyId taxonomy = TaxonomyId::Mikels8;
  Task task = Task::EuEvoked;
  Strategy strategy = Strategy::Basic;
};

// Complete record of one AffectToT run: scan, branch, verify, prune, select.
struct GatTrace {
  std::string item_id;
  SegmentationParams scaffold_params;
  int region_count = 0;
  std::map<int, std::string> stage1;
  std::string polarity_estimate;
  std::vector<Hypothesis> hypotheses;  // parallel to verdicts
  std::vector<Verdict> verdicts;
  std::set<int> pruned;
  int chosen = -1;
  std::string final_label;
  bool low_confidence = false;  // every branch pruned; fell back to global argmax
  std::vector<std::string> warnings;
};

enum class RunStatus { Ok, ParseFailed, BackendFailed };
const char* to_string(RunStatus status) noexcept;

struct RawExchange {
  std::string template_id;
  std::string prompt_hash;
  std::string response;
};

struct RunRecord {
  std::string item_id;
  Strategy strategy = Strategy::Basic;
  RunStatus status = RunStatus::Ok;
  std::string template_id;           // primary template driving the run
  std::optional<int> prefix_index;   // EU Basic only
  std::optional<std::string> prediction;  // label (EU) or generated text (ER/EGCG)
  std::string error;                 // populated when status != Ok
  std::vector<RawExchange> raw;      // every backend call, in order
  std::optional<GatTrace> trace;
};

struct EngineOptions {
  SegmentationParams scaffold;
  double prune_threshold = 0.5;
  std::uint64_t seed = 0;
  int parallelism = 4;
  std::string model_name;
  double temperature = 0.0;
  int max_tokens = 1024;
};

struct BatchResult {
  std::vector<std::optional<RunRecord>> records;  // manifest order; empty if cancelled early
  bool cancelled = false;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total, const RunRecord&)>;

class Engine {
 public:
  Engine(const PromptForge& forge, Backend& backend, EngineOptions options);

  // Dispatches on (task, strategy).
  RunRecord run_item(const EvalItem& item);

  // EU with GAT: scaffold -> region scan -> polarity probe -> <=3 hypotheses
  // -> grounded verification -> prune/select. Exactly 3 + H backend calls.
  RunRecord run_affect_tot(const EvalItem& item);

  // ER/EGCG with GAT: scaffold + one two-step grounded prompt.
  RunRecord run_grounded_generation(const EvalItem& item);

  // EU Basic/CoT and ungrounded ER/EGCG; raw image attached.
  RunRecord run_baseline(const EvalItem& item);

  // Bounded-parallel dispatch; output order equals manifest order and one
  // item's failure never aborts the batch.
  BatchResult run_batch(const std::vector<EvalItem>& manifest, const ProgressFn& progress = {},
                        const std::atomic<bool>* cancel = nullptr);

 private:
  const PromptForge& forge_;
  Backend& backend_;
  EngineOptions options_;
};

// Pre-flight manifest validation: unique ids, labels inside their taxonomy.
Status validate_manifest(const std::vector<EvalItem>& items);

// --- JSONL schemas -----------------------------------------------------------

Result<std::vector<EvalItem>> read_manifest_jsonl(const std::filesystem::path& path);
Result<EvalItem> manifest_line_to_item(std::string_view line, std::size_t line_number);

std::string run_record_to_jsonl(const RunRecord& record);
Result<RunRecord> run_record_from_jsonl(std::string_view line);
Status write_run_jsonl(const std::vector<RunRecord>& records, const std::filesystem::path& path);
Result<std::vector<RunRecord>> read_run_jsonl(const std::filesystem::path& path);

struct JudgeScoreLine {
  std::string item_id;
  JudgeScores scores;
};
Result<std::vector<JudgeScoreLine>> read_judge_jsonl(const std::filesystem::path& path);

}  // namespace aica
