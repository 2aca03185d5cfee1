#include "aica/parsers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <optional>

#include <nlohmann/json.hpp>

namespace aica {

namespace {

std::string lower_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b])) != 0) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])) != 0) --e;
  return s.substr(b, e - b);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

// Whole-word, case-insensitive search; returns byte offset or npos.
std::size_t find_word(const std::string& haystack_lower, std::string_view word,
                      std::size_t from = 0) {
  while (true) {
    std::size_t pos = haystack_lower.find(word.data(), from, word.size());
    if (pos == std::string::npos) return std::string::npos;
    bool left_ok = pos == 0 || !is_word_char(static_cast<unsigned char>(haystack_lower[pos - 1]));
    std::size_t end = pos + word.size();
    bool right_ok =
        end == haystack_lower.size() || !is_word_char(static_cast<unsigned char>(haystack_lower[end]));
    if (left_ok && right_ok) return pos;
    from = pos + 1;
  }
}

// Matches "region <int> :" (any ASCII case, optional spaces) at the start of
// a trimmed line; returns the id and the description remainder.
std::optional<std::pair<int, std::string_view>> match_region_header(std::string_view line) {
  std::string_view t = trim(line);
  if (t.size() < 7) return std::nullopt;
  static constexpr std::string_view kWord = "region";
  for (std::size_t i = 0; i < kWord.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(t[i])) != kWord[i]) return std::nullopt;
  }
  std::size_t i = kWord.size();
  if (i >= t.size() || !std::isspace(static_cast<unsigned char>(t[i]))) return std::nullopt;
  while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i])) != 0) ++i;
  std::size_t digits_begin = i;
  while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i])) != 0) ++i;
  if (i == digits_begin || i - digits_begin > 6) return std::nullopt;
  int id = 0;
  for (std::size_t d = digits_begin; d < i; ++d) id = id * 10 + (t[d] - '0');
  while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i])) != 0) ++i;
  if (i >= t.size() || t[i] != ':') return std::nullopt;
  ++i;
  return std::make_pair(id, trim(t.substr(i)));
}

std::optional<double> first_number(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    bool starts_number = std::isdigit(c) != 0 ||
                         (c == '.' && i + 1 < text.size() &&
                          std::isdigit(static_cast<unsigned char>(text[i + 1])) != 0);
    if (!starts_number) continue;
    std::size_t j = i;
    bool seen_dot = false;
    while (j < text.size()) {
      unsigned char d = static_cast<unsigned char>(text[j]);
      if (std::isdigit(d) != 0) {
        ++j;
      } else if (d == '.' && !seen_dot) {
        seen_dot = true;
        ++j;
      } else {
        break;
      }
    }
    return std::strtod(std::string(text.substr(i, j - i)).c_str(), nullptr);
  }
  return std::nullopt;
}

// Removes "(0.0 - 1.0)"-style range annotations so the scale bounds are not
// mistaken for the score itself.
std::string strip_score_range(std::string_view line) {
  std::string out(line);
  while (true) {
    std::size_t open = out.find('(');
    if (open == std::string::npos) break;
    std::size_t close = out.find(')', open);
    if (close == std::string::npos) break;
    std::string inner = out.substr(open + 1, close - open - 1);
    bool is_range = inner.find('-') != std::string::npos &&
                    inner.find_first_not_of("01. -") == std::string::npos;
    if (!is_range) break;
    out.erase(open, close - open + 1);
  }
  return out;
}

}  // namespace

const char* to_string(IntensityLevel level) noexcept {
  switch (level) {
    case IntensityLevel::Low: return "Low";
    case IntensityLevel::Medium: return "Medium";
    case IntensityLevel::High: return "High";
  }
  return "?";
}

const char* to_string(ScenePolarity p) noexcept {
  switch (p) {
    case ScenePolarity::Positive: return "positive";
    case ScenePolarity::Negative: return "negative";
    case ScenePolarity::Mixed: return "mixed";
  }
  return "?";
}

const std::vector<std::string>& judge_criteria(JudgeTask task) {
  static const std::vector<std::string> er = {"emotional_alignment", "descriptiveness",
                                              "causal_soundness"};
  static const std::vector<std::string> egcg = {"emotional_alignment", "descriptiveness"};
  return task == JudgeTask::Er ? er : egcg;
}

Result<std::map<int, std::string>> parse_stage1(std::string_view text) {
  std::map<int, std::string> regions;
  int current = -1;
  for (std::string_view line : split_lines(text)) {
    if (auto header = match_region_header(line)) {
      auto [id, rest] = *header;
      if (regions.contains(id)) {
        current = -1;  // duplicate id: keep the first occurrence, drop this block
        continue;
      }
      regions.emplace(id, std::string(rest));
      current = id;
    } else if (current >= 0) {
      std::string_view t = trim(line);
      if (t.empty()) continue;
      std::string& desc = regions[current];
      if (!desc.empty()) desc.push_back('\n');
      desc.append(t);
    }
  }
  if (regions.empty()) {
    return make_error(Errc::NoRegionsFound, "no 'Region <n>:' lines found");
  }
  return regions;
}

Result<Stage2Parse> parse_stage2(std::string_view text, TaxonomyId taxonomy) {
  const std::string lowered = lower_ascii(text);

  // Locate "hypothesis <letter>" markers in text order.
  struct Marker {
    std::size_t pos;
    int index;  // a -> 0, b -> 1, c -> 2
  };
  std::vector<Marker> markers;
  std::size_t from = 0;
  while (true) {
    std::size_t pos = find_word(lowered, "hypothesis", from);
    if (pos == std::string::npos) break;
    std::size_t i = pos + 10;
    while (i < lowered.size() && (lowered[i] == ' ' || lowered[i] == '\t')) ++i;
    if (i < lowered.size() && lowered[i] >= 'a' && lowered[i] <= 'c') {
      bool boundary = i + 1 == lowered.size() ||
                      !is_word_char(static_cast<unsigned char>(lowered[i + 1]));
      if (boundary) markers.push_back(Marker{pos, lowered[i] - 'a'});
    }
    from = pos + 1;
  }

  Stage2Parse out;
  int last_index = -1;
  for (std::size_t m = 0; m < markers.size(); ++m) {
    if (markers[m].index <= last_index) continue;  // keep indices strictly increasing
    std::size_t begin = markers[m].pos;
    std::size_t end = m + 1 < markers.size() ? markers[m + 1].pos : text.size();
    std::string_view block = text.substr(begin, end - begin);
    const std::string block_lower = lowered.substr(begin, end - begin);

    auto label = parse_label(block, taxonomy);
    if (!label.ok()) {
      out.warnings.push_back("hypothesis " + std::string(1, static_cast<char>('A' + markers[m].index)) +
                             ": no valid emotion label, dropped");
      continue;
    }

    std::optional<IntensityLevel> intensity;
    std::size_t low = find_word(block_lower, "low");
    std::size_t medium = find_word(block_lower, "medium");
    std::size_t high = find_word(block_lower, "high");
    std::size_t best = std::min({low, medium, high});
    if (best == std::string::npos) {
      out.warnings.push_back("hypothesis " + std::string(1, static_cast<char>('A' + markers[m].index)) +
                             ": no intensity level, dropped");
      continue;
    }
    if (best == low) {
      intensity = IntensityLevel::Low;
    } else if (best == medium) {
      intensity = IntensityLevel::Medium;
    } else {
      intensity = IntensityLevel::High;
    }

    // Evidence text: everything from the "Evidence" token when present,
    // otherwise the block after its first line.
    std::size_t ev = find_word(block_lower, "evidence");
    std::string_view evidence;
    if (ev != std::string::npos) {
      evidence = trim(block.substr(ev));
    } else {
      std::size_t nl = block.find('\n');
      evidence = nl == std::string_view::npos ? std::string_view{} : trim(block.substr(nl + 1));
    }

    Hypothesis hyp;
    hyp.index = markers[m].index;
    hyp.label = std::move(label).take();
    hyp.intensity = *intensity;
    hyp.evidence = std::string(evidence);

    const std::string ev_lower = lower_ascii(evidence);
    std::size_t rpos = 0;
    while ((rpos = find_word(ev_lower, "region", rpos)) != std::string::npos) {
      std::size_t i = rpos + 6;
      while (i < ev_lower.size() &&
             (ev_lower[i] == ' ' || ev_lower[i] == '[' || ev_lower[i] == '#')) {
        ++i;
      }
      std::size_t dbegin = i;
      int id = 0;
      while (i < ev_lower.size() && std::isdigit(static_cast<unsigned char>(ev_lower[i])) != 0 &&
             i - dbegin < 6) {
        id = id * 10 + (ev_lower[i] - '0');
        ++i;
      }
      if (i > dbegin) hyp.cited_regions.insert(id);
      rpos += 1;
    }

    out.hypotheses.push_back(std::move(hyp));
    last_index = markers[m].index;
  }

  if (out.hypotheses.empty()) {
    return make_error(Errc::ParseFailure, "no well-formed hypothesis found");
  }
  return out;
}

Stage3Parse parse_stage3(std::string_view text) {
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line_lower = lower_ascii(lines[i]);
    if (find_word(line_lower, "score") == std::string::npos) continue;
    std::string cleaned = strip_score_range(lines[i]);
    auto number = first_number(cleaned);
    if (!number) continue;
    Stage3Parse out;
    out.verdict.score = std::clamp(*number, 0.0, 1.0);
    std::string critique;
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      if (!critique.empty()) critique.push_back('\n');
      critique.append(lines[j]);
    }
    out.verdict.critique = std::move(critique);
    out.score_found = true;
    return out;
  }
  return Stage3Parse{Verdict{0.0, std::string(text)}, false};
}

PolarityParse parse_polarity(std::string_view text) {
  const std::string lowered = lower_ascii(text);
  std::size_t pos_positive = find_word(lowered, "positive");
  std::size_t pos_negative = find_word(lowered, "negative");
  std::size_t pos_mixed = find_word(lowered, "mixed");
  std::size_t best = std::min({pos_positive, pos_negative, pos_mixed});
  if (best == std::string::npos) return PolarityParse{ScenePolarity::Mixed, false};
  if (best == pos_positive) return PolarityParse{ScenePolarity::Positive, true};
  if (best == pos_negative) return PolarityParse{ScenePolarity::Negative, true};
  return PolarityParse{ScenePolarity::Mixed, true};
}

Result<JudgeScores> parse_judge(std::string_view text, JudgeTask task) {
  // First balanced {...} block, quote-aware.
  std::size_t open = text.find('{');
  if (open == std::string_view::npos) {
    return make_error(Errc::MalformedJson, "no JSON object found");
  }
  std::size_t close = std::string_view::npos;
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      --depth;
      if (depth == 0) {
        close = i;
        break;
      }
    }
  }
  if (close == std::string_view::npos) {
    return make_error(Errc::MalformedJson, "unbalanced JSON object");
  }

  nlohmann::json doc =
      nlohmann::json::parse(text.substr(open, close - open + 1), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return make_error(Errc::MalformedJson, "JSON object failed to parse");
  }

  const auto& criteria = judge_criteria(task);
  JudgeScores scores;
  for (const auto& criterion : criteria) {
    if (!doc.contains(criterion)) {
      return make_error(Errc::MissingCriterion, "missing criterion: " + criterion);
    }
    const auto& v = doc[criterion];
    if (!v.is_number_integer()) {
      return make_error(Errc::MalformedJson, "criterion " + criterion + " is not an integer");
    }
    int score = v.get<int>();
    if (score < 1 || score > 5) {
      return make_error(Errc::OutOfRange,
                        "criterion " + criterion + " = " + std::to_string(score) +
                            " outside [1, 5]");
    }
    scores[criterion] = score;
  }
  for (const auto& [key, _] : doc.items()) {
    if (std::find(criteria.begin(), criteria.end(), key) == criteria.end()) {
      return make_error(Errc::MalformedJson, "unexpected criterion: " + key);
    }
  }
  return scores;
}

Result<InstructionGenOutput> parse_instruction_gen(std::string_view text) {
  static const std::vector<std::string> headers = {
      "reasoning question:", "reasoning answer:", "generation instruction:",
      "generation answer:"};
  static const std::vector<std::string> names = {
      "Reasoning Question", "Reasoning Answer", "Generation Instruction", "Generation Answer"};

  const std::string lowered = lower_ascii(text);
  std::array<std::size_t, 4> begin{};  // content start per section
  std::array<std::size_t, 4> header_at{};
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < headers.size(); ++i) {
    std::size_t pos = lowered.find(headers[i], cursor);
    if (pos == std::string::npos) {
      return make_error(Errc::MissingSection, names[i]);
    }
    header_at[i] = pos;
    begin[i] = pos + headers[i].size();
    cursor = begin[i];
  }

  auto section = [&](std::size_t i) {
    std::size_t end = i + 1 < 4 ? header_at[i + 1] : text.size();
    return std::string(trim(text.substr(begin[i], end - begin[i])));
  };

  InstructionGenOutput out;
  out.reasoning_question = section(0);
  out.reasoning_answer = section(1);
  out.generation_instruction = section(2);
  out.generation_answer = section(3);
  const std::array<const std::string*, 4> fields = {
      &out.reasoning_question, &out.reasoning_answer, &out.generation_instruction,
      &out.generation_answer};
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i]->empty()) return make_error(Errc::MissingSection, names[i]);
  }
  return out;
}

}  // namespace aica
