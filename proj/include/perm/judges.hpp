#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perm/cache.hpp"
#include "perm/types.hpp"

namespace perm::judges {

struct DecodeParams {
  double temperature = 0.0;
  int max_output_tokens = 1024;
};

struct JudgeRequest {
  Perspective perspective = Perspective::Resonation;
  std::string prompt;
  DecodeParams decode;
};

/// Optional judged material passed alongside a request. Deterministic
/// backends match rules against it; the remote backend ignores it.
struct EvalContext {
  const DialogueCase* dialogue = nullptr;
  const Candidate* candidate = nullptr;
};

class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;
  /// Returns raw judge text. Must tolerate concurrent calls.
  virtual std::string evaluate(const JudgeRequest& request, const EvalContext& context) = 0;
  virtual std::string identity() const = 0;
  /// True when calls leave the process; drives concurrent dispatch.
  virtual bool remote() const { return false; }
};

std::string evaluate(JudgeBackend& backend, const JudgeRequest& request);

/// One deterministic judging rule: literal-substring / length conditions
/// over the case and candidate, and the score to emit. A rule with no
/// conditions is a catch-all.
struct ScriptedRule {
  Perspective perspective = Perspective::Resonation;
  std::optional<std::string> response_contains;
  std::optional<std::string> analysis_contains;
  std::optional<std::string> query_contains;
  std::optional<int> min_response_length;
  std::optional<int> max_response_length;
  int score = 0;
  int priority = 0;
  std::string reason = "scripted default";

  bool is_catch_all() const;
  bool matches(const DialogueCase& dialogue, const Candidate& candidate) const;
};

/// Requires a catch-all and distinct priorities per perspective, and scores
/// within the default scale of their perspective.
void validate_scripted_rules(const std::vector<ScriptedRule>& rules);

std::vector<ScriptedRule> scripted_rules_from_json(std::string_view json_text);
std::vector<ScriptedRule> load_scripted_rules(const std::string& path);

/// The versioned rule table shipped under assets/fixtures, embedded at
/// build time.
const std::vector<ScriptedRule>& fixture_rules();

/// Emits verdict text in the exact output format of the perspective,
/// embedding the highest-priority matching rule's score. Pure.
std::string scripted_judge_text(const std::vector<ScriptedRule>& rules, Perspective p,
                                const DialogueCase& dialogue, const Candidate& candidate);

class ScriptedBackend : public JudgeBackend {
 public:
  explicit ScriptedBackend(std::vector<ScriptedRule> rules);

  std::string evaluate(const JudgeRequest& request, const EvalContext& context) override;
  std::string identity() const override { return identity_; }

  const std::vector<ScriptedRule>& rules() const { return rules_; }

 private:
  std::vector<ScriptedRule> rules_;
  std::string identity_;
};

struct RemoteBackendConfig {
  std::string base_url;
  std::string model_name;
  std::string auth_token_env = "PERM_JUDGE_TOKEN";
  double timeout_s = 30.0;
  int max_retries = 2;
  int backoff_base_ms = 250;
};

/// Client for a chat-style completion endpoint: POSTs the prompt as a single
/// user message with decode parameters, authorized by a bearer token read
/// from the configured environment variable. Failed attempts are retried
/// with exponential backoff up to max_retries.
class RemoteBackend : public JudgeBackend {
 public:
  explicit RemoteBackend(RemoteBackendConfig config);

  std::string evaluate(const JudgeRequest& request, const EvalContext& context) override;
  std::string identity() const override;
  bool remote() const override { return true; }

  const RemoteBackendConfig& config() const { return config_; }

 private:
  RemoteBackendConfig config_;
};

/// Serves repeated requests from a JudgeCache, keyed on
/// (perspective, model, prompt, decode). Misses go to the inner backend and
/// are stored; hits never reach it.
class CachingBackend : public JudgeBackend {
 public:
  CachingBackend(std::shared_ptr<JudgeBackend> inner, std::shared_ptr<JudgeCache> cache,
                 std::string model_name);

  std::string evaluate(const JudgeRequest& request, const EvalContext& context) override;
  std::string identity() const override { return inner_->identity(); }
  bool remote() const override { return inner_->remote(); }

  const JudgeCache& cache() const { return *cache_; }

 private:
  std::shared_ptr<JudgeBackend> inner_;
  std::shared_ptr<JudgeCache> cache_;
  std::string model_name_;
};

/// Caps concurrent in-flight calls to the inner backend.
class ConcurrencyLimitedBackend : public JudgeBackend {
 public:
  ConcurrencyLimitedBackend(std::shared_ptr<JudgeBackend> inner, int limit);
  ~ConcurrencyLimitedBackend() override;

  std::string evaluate(const JudgeRequest& request, const EvalContext& context) override;
  std::string identity() const override { return inner_->identity(); }
  bool remote() const override { return inner_->remote(); }

 private:
  struct Gate;
  std::shared_ptr<JudgeBackend> inner_;
  std::unique_ptr<Gate> gate_;
};

std::string judge_cache_key(Perspective p, std::string_view model_name, std::string_view prompt,
                            const DecodeParams& decode);

/// Assembles the configured backend stack: scripted or remote, optionally
/// cached, remote calls bounded by the config's concurrency limit.
std::shared_ptr<JudgeBackend> make_backend(const EngineConfig& config);

namespace assets {
std::string_view scripted_rules_json();
}

}  // namespace perm::judges
