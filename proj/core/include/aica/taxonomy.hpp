#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aica/result.hpp"

namespace aica {

// The categorical label spaces used by the benchmark's source datasets.
enum class TaxonomyId {
  Ekman6,
  Ekman6PlusNeutral,
  Mikels8,
  Plutchik8,
};

enum class Polarity {
  Positive,
  Negative,
  Neutral,  // reserved for the explicit "neutral" label of Ekman6PlusNeutral
};

// Classification of a (gold, prediction) pair:
//   Correct        gold == prediction
//   IntensityError gold != prediction, same polarity
//   PolarityError  polarities differ
enum class ErrorClass {
  Correct,
  IntensityError,
  PolarityError,
};

struct EmotionLabel {
  std::string name;  // canonical lowercase token
  TaxonomyId taxonomy;

  friend bool operator==(const EmotionLabel&, const EmotionLabel&) = default;
};

const char* to_string(TaxonomyId id) noexcept;
const char* to_string(Polarity p) noexcept;
const char* to_string(ErrorClass c) noexcept;
std::optional<TaxonomyId> taxonomy_from_string(std::string_view name);

// Fixed, documented ordering of the label space; identical on every call.
const std::vector<EmotionLabel>& label_space(TaxonomyId id);

// Polarity assignment from the taxonomy table. `label` must be canonical.
Polarity polarity(const EmotionLabel& label);

// Maps free-form model output onto the option list: case-insensitive exact
// match after trimming surrounding whitespace/punctuation, otherwise the
// earliest whole-word occurrence of any canonical name, scanning left to
// right (ties at the same position resolve to the lower option index).
Result<EmotionLabel> parse_label(std::string_view text, TaxonomyId id);

// Errors with TaxonomyMismatch when gold and pred disagree on taxonomy.
Result<ErrorClass> classify_error(const EmotionLabel& gold, const EmotionLabel& pred);

// Dataset name -> label model, as shipped with the benchmark metadata.
const std::vector<std::pair<std::string, TaxonomyId>>& dataset_assignments();
std::optional<TaxonomyId> dataset_taxonomy(std::string_view dataset_name);

// Canonical JSON document of every taxonomy table (ordered labels plus
// polarity) and the dataset assignments. The copy shipped in assets/ must
// match this byte for byte; a unit test enforces it.
std::string taxonomy_tables_json();

}  // namespace aica
