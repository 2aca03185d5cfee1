#include "aica/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace aica {

namespace {

constexpr const char* kReportSchema = "aica.report.v1";

// 6 significant digits, parsed back so the JSON dump stays short and stable.
double round6(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return std::strtod(buf, nullptr);
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  nlohmann::json j;  // std::map storage: keys serialize sorted
  j["schema"] = kReportSchema;

  if (report.eu.has_value()) {
    j["eu"] = {{"accuracy", round6(report.eu->accuracy)},
               {"macro_f1", round6(report.eu->macro_f1)},
               {"weighted_f1", round6(report.eu->weighted_f1)},
               {"items", report.eu->items},
               {"unparsed", report.eu->unparsed}};
  }
  if (!report.criterion_pcts.empty()) {
    nlohmann::json pcts;
    for (const auto& [task, criteria] : report.criterion_pcts) {
      for (const auto& [criterion, pct] : criteria) {
        pcts[task][criterion] = round6(pct);
      }
    }
    j["criterion_pcts"] = std::move(pcts);
  }
  nlohmann::json avgs;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v.has_value()) avgs[key] = round6(*v);
  };
  put("eu_basic", report.eu_basic);
  put("eu_cot", report.eu_cot);
  put("eu_avg", report.eu_avg);
  put("er_avg", report.er_avg);
  put("eg_avg", report.eg_avg);
  put("overall_avg", report.overall_avg);
  if (!avgs.empty()) j["task_avgs"] = std::move(avgs);

  if (report.errors.has_value()) {
    const ErrorTaxonomyReport& e = *report.errors;
    nlohmann::json errors;
    errors["intensity_count"] = e.intensity_count;
    errors["polarity_count"] = e.polarity_count;
    errors["total_errors"] = e.total_errors;
    errors["no_errors"] = e.no_errors;
    errors["intensity_pct"] = round6(e.intensity_pct());
    errors["polarity_pct"] = round6(e.polarity_pct());
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : e.top_pairs) {
      pairs.push_back({{"gold", p.gold},
                       {"pred", p.pred},
                       {"count", p.count},
                       {"pct", round6(p.pct)}});
    }
    errors["top_pairs"] = std::move(pairs);
    j["error_taxonomy"] = std::move(errors);
  }
  return j.dump(2) + "\n";
}

Result<EvalReport> report_from_json(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("schema", "") != kReportSchema) {
    return make_error(Errc::InvalidManifest, "not a report document");
  }
  EvalReport report;
  try {
    if (j.contains("eu")) {
      EuSection eu;
      eu.accuracy = j["eu"].at("accuracy").get<double>();
      eu.macro_f1 = j["eu"].at("macro_f1").get<double>();
      eu.weighted_f1 = j["eu"].at("weighted_f1").get<double>();
      eu.items = j["eu"].at("items").get<std::int64_t>();
      eu.unparsed = j["eu"].at("unparsed").get<std::int64_t>();
      report.eu = eu;
    }
    if (j.contains("criterion_pcts")) {
      for (const auto& [task, criteria] : j["criterion_pcts"].items()) {
        for (const auto& [criterion, pct] : criteria.items()) {
          report.criterion_pcts[task][criterion] = pct.get<double>();
        }
      }
    }
    if (j.contains("task_avgs")) {
      const auto& avgs = j["task_avgs"];
      auto get = [&](const char* key) -> std::optional<double> {
        if (avgs.contains(key)) return avgs[key].get<double>();
        return std::nullopt;
      };
      report.eu_basic = get("eu_basic");
      report.eu_cot = get("eu_cot");
      report.eu_avg = get("eu_avg");
      report.er_avg = get("er_avg");
      report.eg_avg = get("eg_avg");
      report.overall_avg = get("overall_avg");
    }
    if (j.contains("error_taxonomy")) {
      const auto& e = j["error_taxonomy"];
      ErrorTaxonomyReport errors;
      errors.intensity_count = e.at("intensity_count").get<std::int64_t>();
      errors.polarity_count = e.at("polarity_count").get<std::int64_t>();
      errors.total_errors = e.at("total_errors").get<std::int64_t>();
      errors.no_errors = e.at("no_errors").get<bool>();
      for (const auto& p : e.at("top_pairs")) {
        errors.top_pairs.push_back(TopPair{p.at("gold").get<std::string>(),
                                           p.at("pred").get<std::string>(),
                                           p.at("count").get<std::int64_t>(),
                                           p.at("pct").get<double>()});
      }
      report.errors = errors;
    }
  } catch (const std::exception& e) {
    return make_error(Errc::InvalidManifest, std::string("bad report: ") + e.what());
  }
  return report;
}

std::string report_table(const EvalReport& report) {
  static const char* headers[] = {"EU Basic", "EU CoT",  "EU Avg.",
                                  "ER Avg.",  "EG Avg.", "Overall Avg."};
  const std::optional<double> values[] = {report.eu_basic, report.eu_cot, report.eu_avg,
                                          report.er_avg,   report.eg_avg, report.overall_avg};

  std::string head = "|";
  std::string rule = "|";
  std::string row = "|";
  for (std::size_t i = 0; i < 6; ++i) {
    const std::string h = std::string(" ") + headers[i] + " ";
    head += h + "|";
    rule += std::string(h.size(), '-') + "|";
    std::string cell = values[i].has_value() ? format_pct(*values[i]) : std::string("-");
    if (cell.size() + 2 < h.size()) {
      cell = std::string(h.size() - 2 - cell.size(), ' ') + cell;
    }
    row += " " + cell + " |";
  }

  std::ostringstream out;
  out << head << '\n' << rule << '\n' << row << '\n';

  if (report.eu.has_value()) {
    out << '\n'
        << "EU: accuracy " << format_pct(report.eu->accuracy * 100.0) << "  macro F1 "
        << format_pct(report.eu->macro_f1 * 100.0) << "  weighted F1 "
        << format_pct(report.eu->weighted_f1 * 100.0) << "  (items " << report.eu->items
        << ", unparsed " << report.eu->unparsed << ")\n";
  }
  if (report.errors.has_value()) {
    const ErrorTaxonomyReport& e = *report.errors;
    if (e.no_errors) {
      out << "Error taxonomy (EU): no errors\n";
    } else {
      out << "Error taxonomy (EU): Intensity: " << format_pct(e.intensity_pct())
          << "%  Polarity: " << format_pct(e.polarity_pct()) << "%\n";
      out << "Top confusion pairs:\n";
      for (const auto& p : e.top_pairs) {
        out << "  " << p.gold << " -> " << p.pred << "  " << format_pct(p.pct) << "%  ("
            << p.count << ")\n";
      }
    }
  }
  return out.str();
}

Status write_report(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return make_error(Errc::IoError, "cannot open " + path.string() + " for writing");
  out << report_to_json(report);
  out.flush();
  if (!out) return make_error(Errc::IoError, "write failed: " + path.string());
  return ok_status();
}

Result<EvalReport> read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return make_error(Errc::IoError, "cannot open report: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return report_from_json(buf.str());
}

}  // namespace aica
