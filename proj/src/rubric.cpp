#include "perm/rubric.hpp"

#include <algorithm>
#include <cctype>

namespace perm::rubric {

namespace {

bool is_word_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

/// True when `line` is a markdown header whose word (case-insensitive)
/// equals `word`, e.g. "  # Response  ".
bool is_header_line(std::string_view line, std::string_view word) {
  std::string trimmed = trim_copy(line);
  if (trimmed.empty() || trimmed[0] != '#') return false;
  size_t pos = 1;
  while (pos < trimmed.size() && (trimmed[pos] == ' ' || trimmed[pos] == '\t')) ++pos;
  return lowercase(trimmed.substr(pos)) == word;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string join_lines(const std::vector<std::string_view>& lines, size_t first, size_t last) {
  std::string out;
  for (size_t i = first; i < last; ++i) {
    if (i > first) out += '\n';
    out += lines[i];
  }
  return out;
}

}  // namespace

const std::vector<std::string>& PromptTemplate::slot_names() {
  static const std::vector<std::string> names = {"scenario", "persona", "query", "analysis",
                                                 "response"};
  return names;
}

PromptTemplate PromptTemplate::parse(std::string_view text) {
  PromptTemplate tpl;
  tpl.text_ = std::string(text);

  const auto& names = slot_names();
  Segment current;
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '{') {
      current.literal += text[i];
      ++i;
      continue;
    }
    size_t end = i + 1;
    while (end < text.size() && is_word_char(text[end])) ++end;
    if (end >= text.size() || text[end] != '}' || end == i + 1) {
      // not a {word} placeholder; keep literally
      current.literal += text[i];
      ++i;
      continue;
    }
    std::string_view word = text.substr(i + 1, end - i - 1);
    auto it = std::find(names.begin(), names.end(), word);
    if (it == names.end()) {
      throw Error(ErrorCode::UnknownPlaceholder,
                  "template placeholder {" + std::string(word) + "} is not a named slot");
    }
    tpl.segments_.push_back(std::move(current));
    current = Segment{};
    Segment slot;
    slot.slot = static_cast<int>(it - names.begin());
    tpl.segments_.push_back(std::move(slot));
    i = end + 1;
  }
  tpl.segments_.push_back(std::move(current));
  return tpl;
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
  std::string out;
  out.reserve(text_.size());
  const auto& names = slot_names();
  for (const auto& segment : segments_) {
    if (segment.slot < 0) {
      out += segment.literal;
    } else if (auto it = values.find(names[segment.slot]); it != values.end()) {
      out += it->second;
    }
  }
  return out;
}

int PromptTemplate::slot_count() const {
  return static_cast<int>(
      std::count_if(segments_.begin(), segments_.end(), [](const Segment& s) { return s.slot >= 0; }));
}

bool PromptTemplate::has_slot(std::string_view name) const {
  const auto& names = slot_names();
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return false;
  int idx = static_cast<int>(it - names.begin());
  return std::any_of(segments_.begin(), segments_.end(),
                     [idx](const Segment& s) { return s.slot == idx; });
}

const PromptTemplate& judge_template(Perspective p) {
  static const PromptTemplate resonation = PromptTemplate::parse(assets::judge_template_text(Perspective::Resonation));
  static const PromptTemplate expression = PromptTemplate::parse(assets::judge_template_text(Perspective::Expression));
  static const PromptTemplate reception = PromptTemplate::parse(assets::judge_template_text(Perspective::Reception));
  static const PromptTemplate bystander = PromptTemplate::parse(assets::judge_template_text(Perspective::Bystander));
  switch (p) {
    case Perspective::Resonation: return resonation;
    case Perspective::Expression: return expression;
    case Perspective::Reception: return reception;
    case Perspective::Bystander: return bystander;
  }
  return resonation;
}

std::string render_judge_prompt(Perspective p, const DialogueCase& dialogue,
                                const Candidate& candidate) {
  if (p == Perspective::Resonation) {
    if (trim_copy(candidate.analysis).empty()) {
      throw Error(ErrorCode::MissingAnalysis,
                  "resonation judging requires a non-empty analysis", p);
    }
  } else if (trim_copy(candidate.response).empty()) {
    throw Error(ErrorCode::MissingResponse,
                std::string(to_string(p)) + " judging requires a non-empty response", p);
  }

  // The judged text: the analysis for resonation, the response for everyone
  // else. The expression template names its candidate slot {analysis}, so the
  // judged text is bound to both candidate slots.
  const std::string& judged = p == Perspective::Resonation ? candidate.analysis : candidate.response;
  std::map<std::string, std::string> values = {
      {"scenario", dialogue.scenario},
      {"persona", dialogue.persona},
      {"query", dialogue.query},
      {"analysis", judged},
      {"response", judged},
  };
  return judge_template(p).render(values);
}

PolicyPrompt render_policy_prompt(const DialogueCase& dialogue) {
  static const PromptTemplate user_template = PromptTemplate::parse(assets::policy_user_text());
  PolicyPrompt prompt;
  prompt.system = std::string(assets::policy_system_text());
  prompt.user = user_template.render({
      {"scenario", dialogue.scenario},
      {"persona", dialogue.persona},
      {"query", dialogue.query},
  });
  return prompt;
}

Candidate split_candidate(std::string_view raw, const TokenCounter& counter) {
  auto lines = split_lines(raw);

  size_t response_header = lines.size();
  for (size_t i = 0; i < lines.size(); ++i) {
    if (is_header_line(lines[i], "response")) {
      response_header = i;
      break;
    }
  }
  if (response_header == lines.size()) {
    throw Error(ErrorCode::MissingResponseSection, "generation has no \"# Response\" header");
  }

  size_t analysis_header = response_header;
  for (size_t i = 0; i < response_header; ++i) {
    if (is_header_line(lines[i], "analysis")) {
      analysis_header = i;
      break;
    }
  }

  std::string analysis;
  if (analysis_header < response_header) {
    analysis = trim_copy(join_lines(lines, analysis_header + 1, response_header));
  }
  std::string response = trim_copy(join_lines(lines, response_header + 1, lines.size()));
  if (response.empty()) {
    throw Error(ErrorCode::MissingResponseSection, "\"# Response\" section is empty");
  }
  return make_candidate(std::move(analysis), std::move(response), counter);
}

namespace {

constexpr std::string_view kScoreMarker = "Score:";
constexpr std::string_view kTotalWord = "Total";
constexpr std::string_view kReasonMarker = "Reason:";

/// Parses an integer after `pos`, skipping spaces, tabs and markdown '*'.
/// Returns std::nullopt when no digits follow.
std::optional<long long> integer_after(std::string_view text, size_t pos, size_t* digits_end) {
  while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '*')) ++pos;
  size_t start = pos;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])) &&
         pos - start < 9) {
    ++pos;
  }
  if (pos == start) return std::nullopt;
  long long value = 0;
  for (size_t i = start; i < pos; ++i) value = value * 10 + (text[i] - '0');
  if (digits_end != nullptr) *digits_end = pos;
  return value;
}

/// True when the "Score:" at `pos` is the tail of a "Total Score:" marker.
bool is_total_score(std::string_view text, size_t pos) {
  size_t i = pos;
  while (i > 0 && (text[i - 1] == ' ' || text[i - 1] == '\t')) --i;
  if (i < kTotalWord.size()) return false;
  return text.substr(i - kTotalWord.size(), kTotalWord.size()) == kTotalWord;
}

/// Last "Score: <int>" (not "Total Score:") at or before the end of text.
/// Markers without a following integer are rubric echoes and are skipped.
std::optional<std::pair<size_t, long long>> find_empathy_score(std::string_view text) {
  size_t search_end = text.size();
  while (true) {
    size_t pos = text.rfind(kScoreMarker, search_end);
    if (pos == std::string_view::npos) return std::nullopt;
    if (!is_total_score(text, pos)) {
      if (auto value = integer_after(text, pos + kScoreMarker.size(), nullptr)) {
        return std::make_pair(pos, *value);
      }
    }
    if (pos == 0) return std::nullopt;
    search_end = pos - 1;
  }
}

/// Last full "Total Score: <int> / 100" occurrence.
std::optional<std::pair<size_t, long long>> find_bystander_score(std::string_view text) {
  constexpr std::string_view marker = "Total Score:";
  size_t search_end = text.size();
  while (true) {
    size_t pos = text.rfind(marker, search_end);
    if (pos == std::string_view::npos) return std::nullopt;
    size_t digits_end = 0;
    auto value = integer_after(text, pos + marker.size(), &digits_end);
    if (value) {
      size_t i = digits_end;
      while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '*')) ++i;
      if (i < text.size() && text[i] == '/') {
        ++i;
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
        if (text.substr(i, 3) == "100") {
          return std::make_pair(pos, *value);
        }
      }
    }
    if (pos == 0) return std::nullopt;
    search_end = pos - 1;
  }
}

std::string reason_before(std::string_view text, size_t score_pos) {
  size_t reason = text.rfind(kReasonMarker, score_pos);
  if (reason == std::string_view::npos || reason >= score_pos) return "";
  size_t begin = reason + kReasonMarker.size();
  // slice ends at the start of the score line, or at the marker itself when
  // reason and score share a line
  size_t line_start = text.rfind('\n', score_pos);
  size_t end = (line_start == std::string_view::npos || line_start < begin) ? score_pos
                                                                            : line_start;
  return trim_copy(text.substr(begin, end - begin));
}

}  // namespace

ParsedVerdict parse_verdict(Perspective p, std::string_view judge_text, const ScoreScale& scale) {
  auto found = p == Perspective::Bystander ? find_bystander_score(judge_text)
                                           : find_empathy_score(judge_text);
  if (!found) {
    throw Error(ErrorCode::NoScoreFound,
                "no " + std::string(p == Perspective::Bystander ? "\"Total Score: X / 100\""
                                                                : "\"Score: <integer>\"") +
                    " marker in judge output",
                p);
  }
  auto [pos, value] = *found;
  if (!scale.contains(static_cast<double>(value))) {
    throw Error(ErrorCode::ScoreOutOfRange,
                "score " + std::to_string(value) + " outside scale [" +
                    std::to_string(static_cast<int>(scale.min)) + ", " +
                    std::to_string(static_cast<int>(scale.max)) + "]",
                p);
  }
  ParsedVerdict verdict;
  verdict.raw_score = static_cast<int>(value);
  verdict.reason = reason_before(judge_text, pos);
  return verdict;
}

ParsedVerdict parse_verdict(Perspective p, std::string_view judge_text) {
  return parse_verdict(p, judge_text, default_scale(p));
}

}  // namespace perm::rubric
