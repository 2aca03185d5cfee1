#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aica/parsers.hpp"
#include "aica/taxonomy.hpp"

namespace aica {

enum class PromptTemplateId {
  EuBasicExpressed,
  EuBasicEvoked,
  EuCotExpressed,
  EuCotEvoked,
  GatStage1,
  GatPolarityProbe,
  GatStage2,
  GatStage3,
  GatEr,
  GatEgcg,
  BaselineEr,
  BaselineEgcg,
  InstructionGen,
  JudgeEr,
  JudgeEgcg,
};

const char* to_string(PromptTemplateId id) noexcept;
std::optional<PromptTemplateId> template_from_string(std::string_view name);

enum class EuSubtype { Expressed, Evoked };

// A fully rendered prompt plus the metadata identifying how it was built.
struct PromptBundle {
  PromptTemplateId template_id;
  std::string text;
  std::map<std::string, std::string> placeholders;
  std::optional<int> prefix_index;
  std::optional<TaxonomyId> taxonomy;
};

// Renders every prompt family deterministically from the template assets.
// The bank is immutable after load; rendering is reentrant.
class PromptForge {
 public:
  // Loads templates/*.txt and prefixes.json from the assets directory.
  // Throws std::runtime_error when an asset is missing or malformed.
  static PromptForge load(const std::filesystem::path& assets_dir);

  PromptBundle eu_basic(EuSubtype subtype, int prefix_index, TaxonomyId taxonomy) const;
  PromptBundle eu_cot(EuSubtype subtype, TaxonomyId taxonomy) const;
  PromptBundle gat_stage1() const;
  PromptBundle gat_polarity_probe() const;
  PromptBundle gat_stage2(const std::map<int, std::string>& region_descriptions,
                          std::string_view polarity_estimate, TaxonomyId taxonomy) const;
  PromptBundle gat_stage3(const Hypothesis& hypothesis,
                          const std::map<int, std::string>& region_descriptions) const;
  PromptBundle gat_er() const;
  PromptBundle gat_egcg(const EmotionLabel& target) const;
  PromptBundle baseline_er(const EmotionLabel& emotion) const;
  PromptBundle baseline_egcg(const EmotionLabel& target) const;
  PromptBundle instruction_gen(const EmotionLabel& emotion) const;
  PromptBundle judge(JudgeTask task, std::string_view question, std::string_view answer) const;

  // Deterministic prefix assignment: (fnv1a64(item_id) xor seed) mod bank.
  int select_prefix(EuSubtype subtype, std::string_view item_id, std::uint64_t seed) const;
  std::size_t prefix_count(EuSubtype subtype) const;
  const std::vector<std::string>& prefixes(EuSubtype subtype) const;

  // Raw template text, e.g. for auditing or golden tests.
  const std::string& template_text(PromptTemplateId id) const;

 private:
  PromptForge() = default;

  std::map<PromptTemplateId, std::string> templates_;
  std::vector<std::string> expressed_prefixes_;
  std::vector<std::string> evoked_prefixes_;
};

// Joined option list as rendered into prompts: label names joined by ", ".
std::string render_option_list(TaxonomyId taxonomy);

}  // namespace aica
