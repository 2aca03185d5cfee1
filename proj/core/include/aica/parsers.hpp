#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "aica/result.hpp"
#include "aica/taxonomy.hpp"

namespace aica {

enum class IntensityLevel { Low, Medium, High };
const char* to_string(IntensityLevel level) noexcept;

// One emotion-intensity candidate from the branching stage.
struct Hypothesis {
  int index = 0;  // A -> 0, B -> 1, C -> 2
  EmotionLabel label;
  IntensityLevel intensity = IntensityLevel::Medium;
  std::string evidence;
  std::set<int> cited_regions;

  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

struct Verdict {
  double score = 0.0;  // clamped into [0, 1]
  std::string critique;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct Stage2Parse {
  std::vector<Hypothesis> hypotheses;  // <= 3, indices strictly increasing
  std::vector<std::string> warnings;   // dropped malformed hypotheses
};

struct Stage3Parse {
  Verdict verdict;
  bool score_found = true;  // false => score 0.0 fallback, counts as pruned
};

enum class ScenePolarity { Positive, Negative, Mixed };
const char* to_string(ScenePolarity p) noexcept;

struct PolarityParse {
  ScenePolarity polarity = ScenePolarity::Mixed;
  bool matched = true;  // false => Mixed fallback
};

enum class JudgeTask { Er, Egcg };
// Criterion keys in rubric order; ER carries causal_soundness, EGCG does not.
const std::vector<std::string>& judge_criteria(JudgeTask task);

using JudgeScores = std::map<std::string, int>;  // criterion -> integer 1..5

struct InstructionGenOutput {
  std::string reasoning_question;
  std::string reasoning_answer;
  std::string generation_instruction;
  std::string generation_answer;

  friend bool operator==(const InstructionGenOutput&, const InstructionGenOutput&) = default;
};

// Line-oriented scan for "Region <int>:" anchors (case-insensitive);
// non-matching lines continue the current region's description. Errors with
// NoRegionsFound on zero matches.
Result<std::map<int, std::string>> parse_stage1(std::string_view text);

// Scans for "Hypothesis A/B/C" blocks; labels resolved via parse_label,
// intensity via whole-word low/medium/high, cited regions from "Region <n>"
// mentions in the evidence. Malformed blocks are dropped with a warning;
// zero well-formed blocks is a ParseFailure.
Result<Stage2Parse> parse_stage2(std::string_view text, TaxonomyId taxonomy);

// First decimal number on the line containing "Score" (the "(0.0 - 1.0)"
// range annotation is ignored), clamped into [0, 1]. Total: missing score
// yields {0.0, whole text} with score_found = false.
Stage3Parse parse_stage3(std::string_view text);

// First whole-word positive/negative/mixed; defaults to Mixed.
PolarityParse parse_polarity(std::string_view text);

// Extracts the first balanced {...} block and validates it against the
// task's criterion set; judge output errors always propagate.
Result<JudgeScores> parse_judge(std::string_view text, JudgeTask task);

// Splits on the four instruction-generation headers, enforcing order and
// non-empty bodies; errors name the first missing section.
Result<InstructionGenOutput> parse_instruction_gen(std::string_view text);

}  // namespace aica
