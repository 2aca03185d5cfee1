#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "aica/metrics.hpp"
#include "aica/result.hpp"

namespace aica {

struct EuSection {
  double accuracy = 0.0;     // fractions in [0, 1]
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  std::int64_t items = 0;
  std::int64_t unparsed = 0;
};

// Everything cmd_score produces. Absent sections are omitted from the JSON
// rather than null-filled.
struct EvalReport {
  std::optional<EuSection> eu;
  // task ("er"/"egcg") -> criterion -> percentage
  std::map<std::string, std::map<std::string, double>> criterion_pcts;
  std::optional<double> eu_basic;
  std::optional<double> eu_cot;
  std::optional<double> eu_avg;
  std::optional<double> er_avg;
  std::optional<double> eg_avg;
  std::optional<double> overall_avg;
  std::optional<ErrorTaxonomyReport> errors;
};

// Canonical JSON: sorted keys, floats pre-rounded to 6 significant digits;
// identical reports serialize to identical bytes.
std::string report_to_json(const EvalReport& report);
Result<EvalReport> report_from_json(std::string_view text);

// Leaderboard table (2-decimal, half-up) plus the error-taxonomy block.
std::string report_table(const EvalReport& report);

Status write_report(const EvalReport& report, const std::filesystem::path& path);
Result<EvalReport> read_report(const std::filesystem::path& path);

}  // namespace aica
