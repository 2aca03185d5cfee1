#include "aica/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include <nlohmann/json.hpp>

namespace aica {

namespace {

struct LabelRow {
  const char* name;
  Polarity polarity;
};

// Single auditable table for every label space. Order is the canonical
// option-list order and never changes between releases.
constexpr LabelRow kEkman6[] = {
    {"anger", Polarity::Negative},   {"disgust", Polarity::Negative},
    {"fear", Polarity::Negative},    {"joy", Polarity::Positive},
    {"sadness", Polarity::Negative}, {"surprise", Polarity::Positive},
};

constexpr LabelRow kEkman6PlusNeutral[] = {
    {"anger", Polarity::Negative},   {"disgust", Polarity::Negative},
    {"fear", Polarity::Negative},    {"joy", Polarity::Positive},
    {"sadness", Polarity::Negative}, {"surprise", Polarity::Positive},
    {"neutral", Polarity::Neutral},
};

constexpr LabelRow kMikels8[] = {
    {"amusement", Polarity::Positive}, {"awe", Polarity::Positive},
    {"contentment", Polarity::Positive}, {"excitement", Polarity::Positive},
    {"anger", Polarity::Negative},     {"disgust", Polarity::Negative},
    {"fear", Polarity::Negative},      {"sadness", Polarity::Negative},
};

constexpr LabelRow kPlutchik8[] = {
    {"joy", Polarity::Positive},      {"trust", Polarity::Positive},
    {"fear", Polarity::Negative},     {"surprise", Polarity::Positive},
    {"sadness", Polarity::Negative},  {"disgust", Polarity::Negative},
    {"anger", Polarity::Negative},    {"anticipation", Polarity::Positive},
};

struct TaxonomyTable {
  TaxonomyId id;
  const LabelRow* rows;
  std::size_t size;
};

constexpr TaxonomyTable kTables[] = {
    {TaxonomyId::Ekman6, kEkman6, std::size(kEkman6)},
    {TaxonomyId::Ekman6PlusNeutral, kEkman6PlusNeutral, std::size(kEkman6PlusNeutral)},
    {TaxonomyId::Mikels8, kMikels8, std::size(kMikels8)},
    {TaxonomyId::Plutchik8, kPlutchik8, std::size(kPlutchik8)},
};

const TaxonomyTable& table_for(TaxonomyId id) {
  for (const auto& t : kTables) {
    if (t.id == id) return t;
  }
  return kTables[0];  // unreachable for valid enum values
}

bool is_word_char(unsigned char c) {
  return std::isalnum(c) != 0;
}

std::string lower_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim_noise(std::string_view text) {
  auto junk = [](unsigned char c) { return std::isspace(c) != 0 || std::ispunct(c) != 0; };
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && junk(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && junk(static_cast<unsigned char>(text[e - 1]))) --e;
  return text.substr(b, e - b);
}

}  // namespace

const char* to_string(TaxonomyId id) noexcept {
  switch (id) {
    case TaxonomyId::Ekman6: return "Ekman6";
    case TaxonomyId::Ekman6PlusNeutral: return "Ekman6PlusNeutral";
    case TaxonomyId::Mikels8: return "Mikels8";
    case TaxonomyId::Plutchik8: return "Plutchik8";
  }
  return "?";
}

const char* to_string(Polarity p) noexcept {
  switch (p) {
    case Polarity::Positive: return "Positive";
    case Polarity::Negative: return "Negative";
    case Polarity::Neutral: return "Neutral";
  }
  return "?";
}

const char* to_string(ErrorClass c) noexcept {
  switch (c) {
    case ErrorClass::Correct: return "Correct";
    case ErrorClass::IntensityError: return "IntensityError";
    case ErrorClass::PolarityError: return "PolarityError";
  }
  return "?";
}

std::optional<TaxonomyId> taxonomy_from_string(std::string_view name) {
  for (const auto& t : kTables) {
    if (name == to_string(t.id)) return t.id;
  }
  return std::nullopt;
}

const std::vector<EmotionLabel>& label_space(TaxonomyId id) {
  static const std::map<TaxonomyId, std::vector<EmotionLabel>> spaces = [] {
    std::map<TaxonomyId, std::vector<EmotionLabel>> m;
    for (const auto& t : kTables) {
      std::vector<EmotionLabel> labels;
      labels.reserve(t.size);
      for (std::size_t i = 0; i < t.size; ++i) {
        labels.push_back(EmotionLabel{t.rows[i].name, t.id});
      }
      m.emplace(t.id, std::move(labels));
    }
    return m;
  }();
  return spaces.at(id);
}

Polarity polarity(const EmotionLabel& label) {
  const TaxonomyTable& t = table_for(label.taxonomy);
  for (std::size_t i = 0; i < t.size; ++i) {
    if (label.name == t.rows[i].name) return t.rows[i].polarity;
  }
  // Non-canonical labels cannot be produced through parse_label; treat the
  // stray case as Neutral-free mismatch rather than crash.
  return Polarity::Negative;
}

Result<EmotionLabel> parse_label(std::string_view text, TaxonomyId id) {
  const auto& labels = label_space(id);
  const std::string lowered = lower_ascii(trim_noise(text));
  for (const auto& label : labels) {
    if (lowered == label.name) return label;
  }

  const std::string haystack = lower_ascii(text);
  std::size_t best_pos = std::string::npos;
  const EmotionLabel* best = nullptr;
  for (const auto& label : labels) {
    std::size_t from = 0;
    while (true) {
      std::size_t pos = haystack.find(label.name, from);
      if (pos == std::string::npos) break;
      bool left_ok = pos == 0 || !is_word_char(static_cast<unsigned char>(haystack[pos - 1]));
      std::size_t end = pos + label.name.size();
      bool right_ok = end == haystack.size() ||
                      !is_word_char(static_cast<unsigned char>(haystack[end]));
      if (left_ok && right_ok) {
        if (pos < best_pos) {
          best_pos = pos;
          best = &label;
        }
        break;  // earliest hit for this label found
      }
      from = pos + 1;
    }
  }
  if (best != nullptr) return *best;
  return make_error(Errc::NoLabelFound,
                    "no label of " + std::string(to_string(id)) + " found in text");
}

Result<ErrorClass> classify_error(const EmotionLabel& gold, const EmotionLabel& pred) {
  if (gold.taxonomy != pred.taxonomy) {
    return make_error(Errc::TaxonomyMismatch, "gold and prediction use different taxonomies");
  }
  if (gold.name == pred.name) return ErrorClass::Correct;
  if (polarity(gold) == polarity(pred)) return ErrorClass::IntensityError;
  return ErrorClass::PolarityError;
}

const std::vector<std::pair<std::string, TaxonomyId>>& dataset_assignments() {
  static const std::vector<std::pair<std::string, TaxonomyId>> assignments = {
      {"EMOTIC", TaxonomyId::Ekman6},
      {"EmoSet-118K", TaxonomyId::Mikels8},
      {"FindingEmo", TaxonomyId::Plutchik8},
      {"FI", TaxonomyId::Mikels8},
      {"Emotion6", TaxonomyId::Ekman6PlusNeutral},
      {"FlickrLDL", TaxonomyId::Mikels8},
      {"TwitterLDL", TaxonomyId::Mikels8},
      {"Abstract", TaxonomyId::Mikels8},
      {"ArtPhoto", TaxonomyId::Mikels8},
  };
  return assignments;
}

std::optional<TaxonomyId> dataset_taxonomy(std::string_view dataset_name) {
  for (const auto& [name, id] : dataset_assignments()) {
    if (name == dataset_name) return id;
  }
  return std::nullopt;
}

std::string taxonomy_tables_json() {
  nlohmann::ordered_json doc;
  doc["schema"] = "aica.taxonomies.v1";
  nlohmann::ordered_json taxonomies;
  for (const auto& t : kTables) {
    nlohmann::ordered_json labels = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < t.size; ++i) {
      labels.push_back({{"name", t.rows[i].name}, {"polarity", to_string(t.rows[i].polarity)}});
    }
    taxonomies[to_string(t.id)] = std::move(labels);
  }
  doc["taxonomies"] = std::move(taxonomies);
  nlohmann::ordered_json datasets;
  for (const auto& [name, id] : dataset_assignments()) {
    datasets[name] = to_string(id);
  }
  doc["datasets"] = std::move(datasets);
  return doc.dump(2) + "\n";
}

}  // namespace aica
