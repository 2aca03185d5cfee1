#include "aica/prompts.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "aica/hash.hpp"

namespace aica {

namespace {

struct TemplateFile {
  PromptTemplateId id;
  const char* filename;
};

constexpr TemplateFile kTemplateFiles[] = {
    {PromptTemplateId::EuBasicExpressed, "eu_basic_expressed.txt"},
    {PromptTemplateId::EuBasicEvoked, "eu_basic_evoked.txt"},
    {PromptTemplateId::EuCotExpressed, "eu_cot_expressed.txt"},
    {PromptTemplateId::EuCotEvoked, "eu_cot_evoked.txt"},
    {PromptTemplateId::GatStage1, "gat_stage1.txt"},
    {PromptTemplateId::GatPolarityProbe, "gat_polarity_probe.txt"},
    {PromptTemplateId::GatStage2, "gat_stage2.txt"},
    {PromptTemplateId::GatStage3, "gat_stage3.txt"},
    {PromptTemplateId::GatEr, "gat_er.txt"},
    {PromptTemplateId::GatEgcg, "gat_egcg.txt"},
    {PromptTemplateId::BaselineEr, "baseline_er.txt"},
    {PromptTemplateId::BaselineEgcg, "baseline_egcg.txt"},
    {PromptTemplateId::InstructionGen, "instruction_gen.txt"},
    {PromptTemplateId::JudgeEr, "judge_er.txt"},
    {PromptTemplateId::JudgeEgcg, "judge_egcg.txt"},
};

std::string read_template_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing template asset: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

// Single pass over the template: "{name}" markers with a known name are
// replaced, anything else (including braces inside substituted values) is
// copied through untouched.
std::string substitute(const std::string& tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      std::size_t close = tmpl.find('}', i + 1);
      if (close != std::string::npos) {
        auto it = values.find(tmpl.substr(i + 1, close - i - 1));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

std::string render_region_lines(const std::map<int, std::string>& regions) {
  std::string out;
  for (const auto& [id, description] : regions) {
    if (!out.empty()) out.push_back('\n');
    out += "Region " + std::to_string(id) + ": " + description;
  }
  return out;
}

}  // namespace

const char* to_string(PromptTemplateId id) noexcept {
  switch (id) {
    case PromptTemplateId::EuBasicExpressed: return "EuBasicExpressed";
    case PromptTemplateId::EuBasicEvoked: return "EuBasicEvoked";
    case PromptTemplateId::EuCotExpressed: return "EuCotExpressed";
    case PromptTemplateId::EuCotEvoked: return "EuCotEvoked";
    case PromptTemplateId::GatStage1: return "GatStage1";
    case PromptTemplateId::GatPolarityProbe: return "GatPolarityProbe";
    case PromptTemplateId::GatStage2: return "GatStage2";
    case PromptTemplateId::GatStage3: return "GatStage3";
    case PromptTemplateId::GatEr: return "GatEr";
    case PromptTemplateId::GatEgcg: return "GatEgcg";
    case PromptTemplateId::BaselineEr: return "BaselineEr";
    case PromptTemplateId::BaselineEgcg: return "BaselineEgcg";
    case PromptTemplateId::InstructionGen: return "InstructionGen";
    case PromptTemplateId::JudgeEr: return "JudgeEr";
    case PromptTemplateId::JudgeEgcg: return "JudgeEgcg";
  }
  return "?";
}

std::optional<PromptTemplateId> template_from_string(std::string_view name) {
  for (const auto& t : kTemplateFiles) {
    if (name == to_string(t.id)) return t.id;
  }
  return std::nullopt;
}

std::string render_option_list(TaxonomyId taxonomy) {
  std::string out;
  for (const auto& label : label_space(taxonomy)) {
    if (!out.empty()) out += ", ";
    out += label.name;
  }
  return out;
}

PromptForge PromptForge::load(const std::filesystem::path& assets_dir) {
  PromptForge forge;
  const auto templates_dir = assets_dir / "templates";
  for (const auto& t : kTemplateFiles) {
    forge.templates_[t.id] = read_template_file(templates_dir / t.filename);
  }

  std::ifstream in(assets_dir / "prefixes.json");
  if (!in) throw std::runtime_error("missing prefix bank: " + (assets_dir / "prefixes.json").string());
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.contains("expressed") || !doc.contains("evoked")) {
    throw std::runtime_error("malformed prefix bank");
  }
  forge.expressed_prefixes_ = doc["expressed"].get<std::vector<std::string>>();
  forge.evoked_prefixes_ = doc["evoked"].get<std::vector<std::string>>();
  if (forge.expressed_prefixes_.empty() || forge.evoked_prefixes_.empty()) {
    throw std::runtime_error("prefix bank must hold at least one prefix per subtype");
  }
  return forge;
}

const std::string& PromptForge::template_text(PromptTemplateId id) const {
  return templates_.at(id);
}

const std::vector<std::string>& PromptForge::prefixes(EuSubtype subtype) const {
  return subtype == EuSubtype::Expressed ? expressed_prefixes_ : evoked_prefixes_;
}

std::size_t PromptForge::prefix_count(EuSubtype subtype) const {
  return prefixes(subtype).size();
}

int PromptForge::select_prefix(EuSubtype subtype, std::string_view item_id,
                               std::uint64_t seed) const {
  std::uint64_t h = fnv1a64(item_id) ^ seed;
  return static_cast<int>(h % prefix_count(subtype));
}

PromptBundle PromptForge::eu_basic(EuSubtype subtype, int prefix_index,
                                   TaxonomyId taxonomy) const {
  const auto& bank = prefixes(subtype);
  if (prefix_index < 0 || static_cast<std::size_t>(prefix_index) >= bank.size()) {
    throw std::out_of_range("prefix index " + std::to_string(prefix_index) +
                            " outside bank of " + std::to_string(bank.size()));
  }
  PromptTemplateId id = subtype == EuSubtype::Expressed ? PromptTemplateId::EuBasicExpressed
                                                        : PromptTemplateId::EuBasicEvoked;
  std::map<std::string, std::string> values = {
      {"prefix", bank[static_cast<std::size_t>(prefix_index)]},
      {"options", render_option_list(taxonomy)},
  };
  PromptBundle bundle{id, substitute(templates_.at(id), values), values, prefix_index, taxonomy};
  return bundle;
}

PromptBundle PromptForge::eu_cot(EuSubtype subtype, TaxonomyId taxonomy) const {
  PromptTemplateId id = subtype == EuSubtype::Expressed ? PromptTemplateId::EuCotExpressed
                                                        : PromptTemplateId::EuCotEvoked;
  std::map<std::string, std::string> values = {{"options", render_option_list(taxonomy)}};
  return PromptBundle{id, substitute(templates_.at(id), values), values, std::nullopt, taxonomy};
}

PromptBundle PromptForge::gat_stage1() const {
  return PromptBundle{PromptTemplateId::GatStage1, templates_.at(PromptTemplateId::GatStage1),
                      {}, std::nullopt, std::nullopt};
}

PromptBundle PromptForge::gat_polarity_probe() const {
  return PromptBundle{PromptTemplateId::GatPolarityProbe,
                      templates_.at(PromptTemplateId::GatPolarityProbe),
                      {}, std::nullopt, std::nullopt};
}

PromptBundle PromptForge::gat_stage2(const std::map<int, std::string>& region_descriptions,
                                     std::string_view polarity_estimate,
                                     TaxonomyId taxonomy) const {
  if (region_descriptions.empty()) {
    throw std::invalid_argument("stage 2 needs at least one region description");
  }
  std::map<std::string, std::string> values = {
      {"regions", render_region_lines(region_descriptions)},
      {"polarity", std::string(polarity_estimate)},
      {"options", render_option_list(taxonomy)},
  };
  return PromptBundle{PromptTemplateId::GatStage2,
                      substitute(templates_.at(PromptTemplateId::GatStage2), values), values,
                      std::nullopt, taxonomy};
}

PromptBundle PromptForge::gat_stage3(const Hypothesis& hypothesis,
                                     const std::map<int, std::string>& region_descriptions) const {
  std::map<std::string, std::string> values = {
      {"label", hypothesis.label.name},
      {"intensity", to_string(hypothesis.intensity)},
      {"regions", render_region_lines(region_descriptions)},
  };
  return PromptBundle{PromptTemplateId::GatStage3,
                      substitute(templates_.at(PromptTemplateId::GatStage3), values), values,
                      std::nullopt, hypothesis.label.taxonomy};
}

PromptBundle PromptForge::gat_er() const {
  return PromptBundle{PromptTemplateId::GatEr, templates_.at(PromptTemplateId::GatEr),
                      {}, std::nullopt, std::nullopt};
}

PromptBundle PromptForge::gat_egcg(const EmotionLabel& target) const {
  std::map<std::string, std::string> values = {{"emotion", target.name}};
  return PromptBundle{PromptTemplateId::GatEgcg,
                      substitute(templates_.at(PromptTemplateId::GatEgcg), values), values,
                      std::nullopt, target.taxonomy};
}

PromptBundle PromptForge::baseline_er(const EmotionLabel& emotion) const {
  std::map<std::string, std::string> values = {{"emotion", emotion.name}};
  return PromptBundle{PromptTemplateId::BaselineEr,
                      substitute(templates_.at(PromptTemplateId::BaselineEr), values), values,
                      std::nullopt, emotion.taxonomy};
}

PromptBundle PromptForge::baseline_egcg(const EmotionLabel& target) const {
  std::map<std::string, std::string> values = {{"emotion", target.name}};
  return PromptBundle{PromptTemplateId::BaselineEgcg,
                      substitute(templates_.at(PromptTemplateId::BaselineEgcg), values), values,
                      std::nullopt, target.taxonomy};
}

PromptBundle PromptForge::instruction_gen(const EmotionLabel& emotion) const {
  std::map<std::string, std::string> values = {{"emotion", emotion.name}};
  return PromptBundle{PromptTemplateId::InstructionGen,
                      substitute(templates_.at(PromptTemplateId::InstructionGen), values), values,
                      std::nullopt, emotion.taxonomy};
}

PromptBundle PromptForge::judge(JudgeTask task, std::string_view question,
                                std::string_view answer) const {
  PromptTemplateId id =
      task == JudgeTask::Er ? PromptTemplateId::JudgeEr : PromptTemplateId::JudgeEgcg;
  std::map<std::string, std::string> values = {
      {"question", std::string(question)},
      {"answer", std::string(answer)},
  };
  return PromptBundle{id, substitute(templates_.at(id), values), values, std::nullopt,
                      std::nullopt};
}

}  // namespace aica
