#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aica/parsers.hpp"
#include "aica/result.hpp"
#include "aica/taxonomy.hpp"

namespace aica {

// Dense (gold, pred) counts over one taxonomy plus the unparsed tally.
// Unparsed items (NoLabelFound / ParseFailed) count as incorrect: they
// enlarge N without crediting any class.
struct ConfusionCounts {
  TaxonomyId taxonomy = TaxonomyId::Mikels8;
  std::vector<std::int64_t> counts;  // classes x classes, gold-major
  std::int64_t unparsed = 0;

  explicit ConfusionCounts(TaxonomyId id = TaxonomyId::Mikels8);

  int classes() const noexcept;
  std::int64_t& at(int gold, int pred);
  std::int64_t at(int gold, int pred) const;
  std::int64_t total() const noexcept;  // sum of counts + unparsed

  // Adds one scored item; labels must belong to this taxonomy.
  Status add(const EmotionLabel& gold, const EmotionLabel& pred);
  void add_unparsed() noexcept { ++unparsed; }
};

Result<double> accuracy(const ConfusionCounts& counts);
// Unweighted mean of per-class F1 over classes with gold support > 0.
Result<double> macro_f1(const ConfusionCounts& counts);
// Sum of support(c)/N * F1(c); N includes unparsed items.
Result<double> weighted_f1(const ConfusionCounts& counts);

// s/5 * 100, exactly; OutOfRange outside [1, 5].
Result<double> normalize_score(double s);

struct CriterionScores {
  JudgeTask task = JudgeTask::Er;
  std::map<std::string, JudgeScores> per_item;  // item id -> criterion -> 1..5
};

struct CriteriaAggregate {
  std::map<std::string, double> criterion_pcts;  // criterion -> percentage
  double task_avg = 0.0;  // unweighted mean over the task's criteria
};

Result<CriteriaAggregate> aggregate_criteria(const CriterionScores& scores);

struct LeaderboardAverages {
  double eu_avg = 0.0;
  double overall_avg = 0.0;
};

// eu_avg = (eu_basic + eu_cot) / 2; overall = (eu_avg + er_avg + eg_avg) / 3.
// Values stay unrounded; display formatting rounds half-up to 2 decimals.
LeaderboardAverages compose_leaderboard(double eu_basic, double eu_cot, double er_avg,
                                        double eg_avg);

struct TopPair {
  std::string gold;
  std::string pred;
  std::int64_t count = 0;
  double pct = 0.0;  // of total errors
};

// Intensity-vs-polarity split over erroneous parsed pairs. Counts are the
// exact (rational) representation; percentages derive from one division.
struct ErrorTaxonomyReport {
  std::int64_t intensity_count = 0;
  std::int64_t polarity_count = 0;
  std::int64_t total_errors = 0;
  bool no_errors = true;
  std::vector<TopPair> top_pairs;

  double intensity_pct() const noexcept {
    return total_errors == 0 ? 0.0
                             : 100.0 * static_cast<double>(intensity_count) /
                                   static_cast<double>(total_errors);
  }
  double polarity_pct() const noexcept {
    return total_errors == 0 ? 0.0
                             : 100.0 * static_cast<double>(polarity_count) /
                                   static_cast<double>(total_errors);
  }
};

// top_k most frequent error pairs (ties lexicographic on names).
ErrorTaxonomyReport error_taxonomy(const ConfusionCounts& counts, int top_k = 10);

// Display rounding used across reports: half-up at 2 decimals.
double round_half_up_2(double value) noexcept;
std::string format_pct(double value);

}  // namespace aica
