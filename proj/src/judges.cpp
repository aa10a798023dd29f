#include "perm/judges.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <semaphore>
#include <sstream>

#include <nlohmann/json.hpp>

namespace perm::judges {

using nlohmann::json;

std::string evaluate(JudgeBackend& backend, const JudgeRequest& request) {
  if (request.prompt.empty()) {
    throw Error(ErrorCode::BadConfig, "judge request has an empty prompt", request.perspective);
  }
  return backend.evaluate(request, EvalContext{});
}

bool ScriptedRule::is_catch_all() const {
  return !response_contains && !analysis_contains && !query_contains && !min_response_length &&
         !max_response_length;
}

bool ScriptedRule::matches(const DialogueCase& dialogue, const Candidate& candidate) const {
  if (response_contains &&
      candidate.response.find(*response_contains) == std::string::npos) {
    return false;
  }
  if (analysis_contains &&
      candidate.analysis.find(*analysis_contains) == std::string::npos) {
    return false;
  }
  if (query_contains && dialogue.query.find(*query_contains) == std::string::npos) {
    return false;
  }
  if (min_response_length && candidate.response_length < *min_response_length) return false;
  if (max_response_length && candidate.response_length > *max_response_length) return false;
  return true;
}

void validate_scripted_rules(const std::vector<ScriptedRule>& rules) {
  for (Perspective p : kAllPerspectives) {
    bool has_catch_all = false;
    std::map<int, int> priority_uses;
    ScoreScale scale = default_scale(p);
    for (const auto& rule : rules) {
      if (rule.perspective != p) continue;
      if (rule.is_catch_all()) has_catch_all = true;
      if (++priority_uses[rule.priority] > 1) {
        throw Error(ErrorCode::BadConfig,
                    "scripted rules for " + std::string(to_string(p)) +
                        " share priority " + std::to_string(rule.priority));
      }
      if (!scale.contains(rule.score)) {
        throw Error(ErrorCode::BadConfig,
                    "scripted rule score " + std::to_string(rule.score) + " outside the " +
                        std::string(to_string(p)) + " scale");
      }
    }
    if (!has_catch_all) {
      throw Error(ErrorCode::BadConfig,
                  "scripted rules need a catch-all for " + std::string(to_string(p)));
    }
  }
}

std::vector<ScriptedRule> scripted_rules_from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("scripted rules are not valid JSON: ") + e.what());
  }
  std::vector<ScriptedRule> rules;
  for (const auto& entry : doc.at("rules")) {
    ScriptedRule rule;
    auto perspective = perspective_from_string(entry.at("perspective").get<std::string>());
    if (!perspective) {
      throw Error(ErrorCode::BadConfig,
                  "unknown perspective in scripted rule: " + entry.at("perspective").dump());
    }
    rule.perspective = *perspective;
    if (entry.contains("response_contains")) {
      rule.response_contains = entry["response_contains"].get<std::string>();
    }
    if (entry.contains("analysis_contains")) {
      rule.analysis_contains = entry["analysis_contains"].get<std::string>();
    }
    if (entry.contains("query_contains")) {
      rule.query_contains = entry["query_contains"].get<std::string>();
    }
    if (entry.contains("min_response_length")) {
      rule.min_response_length = entry["min_response_length"].get<int>();
    }
    if (entry.contains("max_response_length")) {
      rule.max_response_length = entry["max_response_length"].get<int>();
    }
    rule.score = entry.at("score").get<int>();
    rule.priority = entry.value("priority", 0);
    rule.reason = entry.value("reason", std::string("scripted default"));
    rules.push_back(std::move(rule));
  }
  validate_scripted_rules(rules);
  return rules;
}

std::vector<ScriptedRule> load_scripted_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) {
    throw Error(ErrorCode::StorageError, "cannot open scripted rules file " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return scripted_rules_from_json(buffer.str());
}

const std::vector<ScriptedRule>& fixture_rules() {
  static const std::vector<ScriptedRule> rules = scripted_rules_from_json(assets::scripted_rules_json());
  return rules;
}

std::string scripted_judge_text(const std::vector<ScriptedRule>& rules, Perspective p,
                                const DialogueCase& dialogue, const Candidate& candidate) {
  const ScriptedRule* best = nullptr;
  for (const auto& rule : rules) {
    if (rule.perspective != p || !rule.matches(dialogue, candidate)) continue;
    if (best == nullptr || rule.priority > best->priority) best = &rule;
  }
  if (best == nullptr) {
    throw Error(ErrorCode::BadConfig,
                "no scripted rule matched for " + std::string(to_string(p)) +
                    " (missing catch-all)",
                p);
  }
  if (p == Perspective::Bystander) {
    return "Overall Assessment: " + best->reason + "\nTotal Score: " +
           std::to_string(best->score) + " / 100";
  }
  return "Reason: " + best->reason + "\nScore: " + std::to_string(best->score);
}

namespace {

std::string rules_digest(const std::vector<ScriptedRule>& rules) {
  std::string canon;
  for (const auto& rule : rules) {
    canon += std::string(to_string(rule.perspective)) + '|' +
             rule.response_contains.value_or("") + '|' + rule.analysis_contains.value_or("") +
             '|' + rule.query_contains.value_or("") + '|' +
             std::to_string(rule.min_response_length.value_or(-1)) + '|' +
             std::to_string(rule.max_response_length.value_or(-1)) + '|' +
             std::to_string(rule.score) + '|' + std::to_string(rule.priority) + '|' +
             rule.reason + '\n';
  }
  return sha256_hex(canon).substr(0, 12);
}

}  // namespace

ScriptedBackend::ScriptedBackend(std::vector<ScriptedRule> rules) : rules_(std::move(rules)) {
  validate_scripted_rules(rules_);
  identity_ = "scripted:" + rules_digest(rules_);
}

std::string ScriptedBackend::evaluate(const JudgeRequest& request, const EvalContext& context) {
  static const DialogueCase empty_case{};
  static const Candidate empty_candidate{};
  const DialogueCase& dialogue = context.dialogue != nullptr ? *context.dialogue : empty_case;
  const Candidate& candidate = context.candidate != nullptr ? *context.candidate : empty_candidate;
  return scripted_judge_text(rules_, request.perspective, dialogue, candidate);
}

CachingBackend::CachingBackend(std::shared_ptr<JudgeBackend> inner,
                               std::shared_ptr<JudgeCache> cache, std::string model_name)
    : inner_(std::move(inner)), cache_(std::move(cache)), model_name_(std::move(model_name)) {}

std::string CachingBackend::evaluate(const JudgeRequest& request, const EvalContext& context) {
  std::string key = judge_cache_key(request.perspective, model_name_, request.prompt, request.decode);
  if (auto hit = cache_->get(key)) {
    return *hit;
  }
  std::string text = inner_->evaluate(request, context);
  cache_->put(key, text);
  return text;
}

struct ConcurrencyLimitedBackend::Gate {
  explicit Gate(int limit) : semaphore(limit) {}
  std::counting_semaphore<1 << 20> semaphore;
};

ConcurrencyLimitedBackend::ConcurrencyLimitedBackend(std::shared_ptr<JudgeBackend> inner, int limit)
    : inner_(std::move(inner)), gate_(std::make_unique<Gate>(std::max(limit, 1))) {}

ConcurrencyLimitedBackend::~ConcurrencyLimitedBackend() = default;

std::string ConcurrencyLimitedBackend::evaluate(const JudgeRequest& request,
                                                const EvalContext& context) {
  gate_->semaphore.acquire();
  try {
    std::string text = inner_->evaluate(request, context);
    gate_->semaphore.release();
    return text;
  } catch (...) {
    gate_->semaphore.release();
    throw;
  }
}

std::string judge_cache_key(Perspective p, std::string_view model_name, std::string_view prompt,
                            const DecodeParams& decode) {
  // length-prefixed fields so distinct inputs cannot collide before hashing
  std::string material;
  auto append = [&material](std::string_view field) {
    material += std::to_string(field.size());
    material += ':';
    material += field;
  };
  append(to_string(p));
  append(model_name);
  append(prompt);
  char decode_repr[64];
  std::snprintf(decode_repr, sizeof(decode_repr), "%.17g/%d", decode.temperature,
                decode.max_output_tokens);
  append(decode_repr);
  return sha256_hex(material);
}

std::shared_ptr<JudgeBackend> make_backend(const EngineConfig& config) {
  std::shared_ptr<JudgeBackend> backend;
  if (config.backend.kind == BackendKind::Scripted) {
    std::vector<ScriptedRule> rules = config.backend.rules_path.empty()
                                          ? fixture_rules()
                                          : load_scripted_rules(config.backend.rules_path);
    backend = std::make_shared<ScriptedBackend>(std::move(rules));
  } else {
    RemoteBackendConfig remote;
    remote.base_url = config.backend.base_url;
    remote.model_name = config.backend.model_name;
    remote.auth_token_env = config.backend.auth_token_env;
    remote.timeout_s = config.backend.timeout_s;
    remote.max_retries = config.max_retries;
    remote.backoff_base_ms = config.backend.backoff_base_ms;
    backend = std::make_shared<ConcurrencyLimitedBackend>(
        std::make_shared<RemoteBackend>(std::move(remote)), config.concurrency_limit);
  }
  if (!config.backend.cache_path.empty()) {
    backend = std::make_shared<CachingBackend>(backend,
                                               std::make_shared<JudgeCache>(config.backend.cache_path),
                                               config.backend.model_name);
  }
  return backend;
}

}  // namespace perm::judges
