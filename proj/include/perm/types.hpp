#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "perm/errors.hpp"

namespace perm {

/// The three empathy judge roles plus the quality watchdog. Resonation,
/// Expression and Reception feed the empathy aggregate; Bystander only ever
/// contributes a penalty.
enum class Perspective {
  Resonation,
  Expression,
  Reception,
  Bystander,
};

constexpr Perspective kAllPerspectives[] = {
    Perspective::Resonation,
    Perspective::Expression,
    Perspective::Reception,
    Perspective::Bystander,
};

constexpr bool is_empathy(Perspective p) { return p != Perspective::Bystander; }

std::string_view to_string(Perspective p);
std::optional<Perspective> perspective_from_string(std::string_view name);

/// Inclusive raw-score range of a judge. Empathy judges default to 1-5,
/// the bystander judge to 0-100.
struct ScoreScale {
  double min = 1.0;
  double max = 5.0;

  bool contains(double raw) const { return raw >= min && raw <= max; }
};

ScoreScale default_scale(Perspective p);

/// One seeker scenario: the conversational context every judge sees.
struct DialogueCase {
  std::string id;
  std::string emotion;
  std::string scenario;
  std::string persona;
  std::string query;
};

/// Counts response tokens. Pluggable so a model tokenizer can replace the
/// whitespace default without touching callers.
using TokenCounter = std::function<int(std::string_view)>;

int whitespace_token_count(std::string_view text);

/// An (analysis, response) generation pair. `response_length` is the token
/// count of `response` under the counter it was built with.
struct Candidate {
  std::string analysis;
  std::string response;
  int response_length = 0;
};

Candidate make_candidate(std::string analysis, std::string response,
                         const TokenCounter& counter = whitespace_token_count);

/// One perspective's judgement: the raw scale score, the judge's stated
/// reason, the [0,1] normalization, and the untouched backend output for
/// replay audits.
struct JudgeVerdict {
  Perspective perspective = Perspective::Resonation;
  double raw_score = 0.0;
  std::string reason;
  double normalized = 0.0;
  std::string judge_text;
};

/// Full reward decomposition for one candidate. Per-perspective fields are
/// present only when that perspective is enabled; a disabled perspective is
/// absent, never zero, so it cannot annihilate the harmonic mean.
struct RewardBreakdown {
  std::optional<double> r_res;
  std::optional<double> r_exp;
  std::optional<double> r_rec;
  double r_emp = 0.0;
  std::optional<double> bys_norm;
  double r_bys = 0.0;  // bys_norm - 1 when bystander enabled, else 0
  double r_len = 0.0;
  double total = 0.0;
};

enum class BackendKind { Scripted, Remote };

std::string_view to_string(BackendKind kind);
std::optional<BackendKind> backend_kind_from_string(std::string_view name);

/// Judge-backend settings carried inside EngineConfig. Flat mirror of the
/// config file's backend block; the judges module turns it into a client.
struct BackendSettings {
  BackendKind kind = BackendKind::Scripted;
  std::string base_url = "http://localhost:8000";
  std::string model_name = "gpt-4o-mini";
  std::string auth_token_env = "PERM_JUDGE_TOKEN";
  double temperature = 0.0;
  int max_output_tokens = 1024;
  double timeout_s = 30.0;
  int backoff_base_ms = 250;
  std::string rules_path;  // scripted backend rule table (empty = built-in fixture rules)
  std::string cache_path;  // empty = caching off
};

/// Everything the reward engine needs to score a candidate, plus backend and
/// concurrency settings. Validated/normalized by `validate_config`.
struct EngineConfig {
  double lambda_bys = 0.5;
  double lambda_len = -0.001;
  int length_threshold_l = 768;
  /// When false, r_len is reported as 0. Training flows keep it on; the CLI
  /// turns it off for evaluation-only scoring.
  bool include_length_penalty = true;
  std::set<Perspective> enabled_perspectives = {
      Perspective::Resonation,
      Perspective::Expression,
      Perspective::Reception,
      Perspective::Bystander,
  };
  std::map<Perspective, ScoreScale> scales;  // filled with defaults by validate_config
  BackendSettings backend;
  int concurrency_limit = 4;
  int max_retries = 2;
  long long rng_seed = 42;
  double epsilon_std = 1e-8;

  bool enabled(Perspective p) const { return enabled_perspectives.count(p) > 0; }
  ScoreScale scale_for(Perspective p) const;
};

/// Rejects cases whose id or query is empty after trimming.
DialogueCase validate_case(const DialogueCase& dialogue);

/// Fills defaulted fields and enforces the config invariants: at least one
/// empathy perspective enabled, lambda_len <= 0, lambda_bys >= 0, sane
/// scales and limits. Idempotent.
EngineConfig validate_config(const EngineConfig& config);

std::string trim_copy(std::string_view text);

}  // namespace perm
