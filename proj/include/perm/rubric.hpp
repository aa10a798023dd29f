#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "perm/types.hpp"

namespace perm::rubric {

/// A prompt with `{scenario}` / `{persona}` / `{query}` / `{analysis}` /
/// `{response}` slots, pre-split into literal and slot segments so rendering
/// is a single concatenation pass. Substituted values are never re-scanned,
/// so braces inside field contents stay literal.
class PromptTemplate {
 public:
  static const std::vector<std::string>& slot_names();

  /// Parses `text`, rejecting `{word}` occurrences that are not one of the
  /// five named slots.
  static PromptTemplate parse(std::string_view text);

  std::string render(const std::map<std::string, std::string>& values) const;

  const std::string& text() const { return text_; }
  /// Total number of slot occurrences (a slot may appear more than once).
  int slot_count() const;
  bool has_slot(std::string_view name) const;

 private:
  struct Segment {
    std::string literal;  // emitted verbatim
    int slot = -1;        // index into slot_names(), or -1
  };

  std::string text_;
  std::vector<Segment> segments_;
};

/// Built-in copies of the shipped template assets (assets/prompts/*.txt),
/// embedded at build time so the library works without a file lookup.
namespace assets {
std::string_view judge_template_text(Perspective p);
std::string_view policy_system_text();
std::string_view policy_user_text();
}  // namespace assets

const PromptTemplate& judge_template(Perspective p);

struct PolicyPrompt {
  std::string system;
  std::string user;
};

/// Renders the judge prompt for one perspective. Resonation is judged on the
/// candidate's analysis; expression, reception and bystander are judged on
/// the response. The expression template labels its candidate slot
/// `{analysis}`, but the text bound there is the response.
std::string render_judge_prompt(Perspective p, const DialogueCase& dialogue,
                                const Candidate& candidate);

/// Renders the fixed policy system prompt and the per-case user prompt that
/// instructs the "# Analysis" / "# Response" output format.
PolicyPrompt render_policy_prompt(const DialogueCase& dialogue);

/// Splits a raw generation at its "# Analysis" / "# Response" headers.
/// Headers match case-insensitively at line start with surrounding
/// whitespace tolerated. The analysis section may be absent; a response
/// section is mandatory and must be non-empty.
Candidate split_candidate(std::string_view raw,
                          const TokenCounter& counter = whitespace_token_count);

struct ParsedVerdict {
  int raw_score = 0;
  std::string reason;
};

/// Extracts the verdict from judge output.
///
/// Empathy perspectives: the score is the integer after the last "Score:"
/// marker that is not part of "Total Score:" and is actually followed by an
/// integer (judges echo the rubric, which contains integer-free "Score:"
/// literals). Bystander: the integer X of the last "Total Score: X / 100".
/// The reason is the text after the last "Reason:" marker before the chosen
/// score marker. Scores outside the perspective's scale raise
/// ScoreOutOfRange so the caller can retry instead of clamping.
ParsedVerdict parse_verdict(Perspective p, std::string_view judge_text,
                            const ScoreScale& scale);
ParsedVerdict parse_verdict(Perspective p, std::string_view judge_text);

}  // namespace perm::rubric
