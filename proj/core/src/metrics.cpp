#include "aica/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace aica {

ConfusionCounts::ConfusionCounts(TaxonomyId id) : taxonomy(id) {
  const auto n = static_cast<std::size_t>(label_space(id).size());
  counts.assign(n * n, 0);
}

int ConfusionCounts::classes() const noexcept {
  return static_cast<int>(label_space(taxonomy).size());
}

std::int64_t& ConfusionCounts::at(int gold, int pred) {
  return counts[static_cast<std::size_t>(gold) * static_cast<std::size_t>(classes()) +
                static_cast<std::size_t>(pred)];
}

std::int64_t ConfusionCounts::at(int gold, int pred) const {
  return counts[static_cast<std::size_t>(gold) * static_cast<std::size_t>(classes()) +
                static_cast<std::size_t>(pred)];
}

std::int64_t ConfusionCounts::total() const noexcept {
  std::int64_t sum = unparsed;
  for (std::int64_t c : counts) sum += c;
  return sum;
}

namespace {

int class_index(const std::vector<EmotionLabel>& labels, const EmotionLabel& label) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].name == label.name) return static_cast<int>(i);
  }
  return -1;
}

struct PerClass {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t support = 0;  // gold occurrences among parsed items
  double f1 = 0.0;
};

std::vector<PerClass> per_class_stats(const ConfusionCounts& counts) {
  const int n = counts.classes();
  std::vector<PerClass> stats(static_cast<std::size_t>(n));
  for (int g = 0; g < n; ++g) {
    for (int p = 0; p < n; ++p) {
      std::int64_t c = counts.at(g, p);
      stats[static_cast<std::size_t>(g)].support += c;
      if (g == p) {
        stats[static_cast<std::size_t>(g)].tp += c;
      } else {
        stats[static_cast<std::size_t>(p)].fp += c;
      }
    }
  }
  for (auto& s : stats) {
    double precision =
        s.tp + s.fp == 0 ? 0.0 : static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
    std::int64_t fn = s.support - s.tp;
    double recall =
        s.tp + fn == 0 ? 0.0 : static_cast<double>(s.tp) / static_cast<double>(s.support);
    s.f1 = precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
  }
  return stats;
}

}  // namespace

Status ConfusionCounts::add(const EmotionLabel& gold, const EmotionLabel& pred) {
  if (gold.taxonomy != taxonomy || pred.taxonomy != taxonomy) {
    return make_error(Errc::TaxonomyMismatch, "labels do not belong to " +
                                                  std::string(to_string(taxonomy)));
  }
  const auto& labels = label_space(taxonomy);
  int g = class_index(labels, gold);
  int p = class_index(labels, pred);
  if (g < 0 || p < 0) {
    return make_error(Errc::NoLabelFound, "label outside taxonomy table");
  }
  ++at(g, p);
  return ok_status();
}

Result<double> accuracy(const ConfusionCounts& counts) {
  const std::int64_t n = counts.total();
  if (n == 0) return make_error(Errc::EmptyInput, "no scored items");
  std::int64_t correct = 0;
  for (int c = 0; c < counts.classes(); ++c) correct += counts.at(c, c);
  return static_cast<double>(correct) / static_cast<double>(n);
}

Result<double> macro_f1(const ConfusionCounts& counts) {
  if (counts.total() == 0) return make_error(Errc::EmptyInput, "no scored items");
  const auto stats = per_class_stats(counts);
  double sum = 0.0;
  int supported = 0;
  for (const auto& s : stats) {
    if (s.support > 0) {
      sum += s.f1;
      ++supported;
    }
  }
  return supported == 0 ? 0.0 : sum / static_cast<double>(supported);
}

Result<double> weighted_f1(const ConfusionCounts& counts) {
  const std::int64_t n = counts.total();
  if (n == 0) return make_error(Errc::EmptyInput, "no scored items");
  const auto stats = per_class_stats(counts);
  double sum = 0.0;
  for (const auto& s : stats) {
    if (s.support > 0) {
      sum += static_cast<double>(s.support) / static_cast<double>(n) * s.f1;
    }
  }
  return sum;
}

Result<double> normalize_score(double s) {
  if (!(s >= 1.0 && s <= 5.0)) {
    return make_error(Errc::OutOfRange, "score outside [1, 5]");
  }
  return s / 5.0 * 100.0;
}

Result<CriteriaAggregate> aggregate_criteria(const CriterionScores& scores) {
  if (scores.per_item.empty()) return make_error(Errc::EmptyInput, "no judge scores");
  const auto& criteria = judge_criteria(scores.task);

  std::map<std::string, double> sums;
  for (const auto& c : criteria) sums[c] = 0.0;
  for (const auto& [item_id, judge] : scores.per_item) {
    for (const auto& c : criteria) {
      auto it = judge.find(c);
      if (it == judge.end()) {
        return make_error(Errc::MissingCriterion, "item " + item_id + " lacks " + c);
      }
      if (it->second < 1 || it->second > 5) {
        return make_error(Errc::OutOfRange,
                          "item " + item_id + " criterion " + c + " outside [1, 5]");
      }
      sums[c] += static_cast<double>(it->second);
    }
    for (const auto& [key, _] : judge) {
      if (std::find(criteria.begin(), criteria.end(), key) == criteria.end()) {
        return make_error(Errc::MalformedJson, "item " + item_id + " has unexpected criterion " + key);
      }
    }
  }

  CriteriaAggregate out;
  double total = 0.0;
  const auto items = static_cast<double>(scores.per_item.size());
  for (const auto& c : criteria) {
    auto pct = normalize_score(sums[c] / items);
    if (!pct.ok()) return pct.error();
    out.criterion_pcts[c] = pct.value();
    total += pct.value();
  }
  out.task_avg = total / static_cast<double>(criteria.size());
  return out;
}

LeaderboardAverages compose_leaderboard(double eu_basic, double eu_cot, double er_avg,
                                        double eg_avg) {
  LeaderboardAverages out;
  out.eu_avg = (eu_basic + eu_cot) / 2.0;
  out.overall_avg = (out.eu_avg + er_avg + eg_avg) / 3.0;
  return out;
}

ErrorTaxonomyReport error_taxonomy(const ConfusionCounts& counts, int top_k) {
  ErrorTaxonomyReport report;
  const auto& labels = label_space(counts.taxonomy);
  const int n = counts.classes();

  struct PairCount {
    int gold;
    int pred;
    std::int64_t count;
  };
  std::vector<PairCount> pairs;
  for (int g = 0; g < n; ++g) {
    for (int p = 0; p < n; ++p) {
      if (g == p) continue;
      std::int64_t c = counts.at(g, p);
      if (c == 0) continue;
      report.total_errors += c;
      auto cls = classify_error(labels[static_cast<std::size_t>(g)],
                                labels[static_cast<std::size_t>(p)]);
      if (cls.ok() && cls.value() == ErrorClass::IntensityError) {
        report.intensity_count += c;
      } else {
        report.polarity_count += c;
      }
      pairs.push_back(PairCount{g, p, c});
    }
  }
  report.no_errors = report.total_errors == 0;
  if (report.no_errors) return report;

  std::sort(pairs.begin(), pairs.end(), [&](const PairCount& a, const PairCount& b) {
    if (a.count != b.count) return a.count > b.count;
    const auto& an = labels[static_cast<std::size_t>(a.gold)].name;
    const auto& bn = labels[static_cast<std::size_t>(b.gold)].name;
    if (an != bn) return an < bn;
    return labels[static_cast<std::size_t>(a.pred)].name <
           labels[static_cast<std::size_t>(b.pred)].name;
  });
  const auto limit = std::min<std::size_t>(pairs.size(), static_cast<std::size_t>(top_k));
  for (std::size_t i = 0; i < limit; ++i) {
    TopPair tp;
    tp.gold = labels[static_cast<std::size_t>(pairs[i].gold)].name;
    tp.pred = labels[static_cast<std::size_t>(pairs[i].pred)].name;
    tp.count = pairs[i].count;
    tp.pct = 100.0 * static_cast<double>(pairs[i].count) /
             static_cast<double>(report.total_errors);
    report.top_pairs.push_back(std::move(tp));
  }
  return report;
}

double round_half_up_2(double value) noexcept {
  // The epsilon rescues binary near-ties like 65.025 stored as 65.024999...
  return std::floor(value * 100.0 + 0.5 + 1e-6) / 100.0;
}

std::string format_pct(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", round_half_up_2(value));
  return buf;
}

}  // namespace aica
