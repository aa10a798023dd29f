#include "perm/types.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace perm {

namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 25> kErrorNames{{
    {ErrorCode::EmptyQuery, "EmptyQuery"},
    {ErrorCode::EmptyId, "EmptyId"},
    {ErrorCode::NoEmpathyPerspective, "NoEmpathyPerspective"},
    {ErrorCode::BadScale, "BadScale"},
    {ErrorCode::BadSign, "BadSign"},
    {ErrorCode::BadConfig, "BadConfig"},
    {ErrorCode::UnknownPlaceholder, "UnknownPlaceholder"},
    {ErrorCode::MissingAnalysis, "MissingAnalysis"},
    {ErrorCode::MissingResponse, "MissingResponse"},
    {ErrorCode::MissingResponseSection, "MissingResponseSection"},
    {ErrorCode::NoScoreFound, "NoScoreFound"},
    {ErrorCode::ScoreOutOfRange, "ScoreOutOfRange"},
    {ErrorCode::TransportError, "TransportError"},
    {ErrorCode::AuthMissing, "AuthMissing"},
    {ErrorCode::Timeout, "Timeout"},
    {ErrorCode::StorageError, "StorageError"},
    {ErrorCode::EmptyScores, "EmptyScores"},
    {ErrorCode::OutOfScale, "OutOfScale"},
    {ErrorCode::OutOfRange, "OutOfRange"},
    {ErrorCode::DomainViolation, "DomainViolation"},
    {ErrorCode::MalformedLine, "MalformedLine"},
    {ErrorCode::MissingField, "MissingField"},
    {ErrorCode::DuplicateId, "DuplicateId"},
    {ErrorCode::MissingResponseEntry, "MissingResponseEntry"},
    {ErrorCode::EmptyRun, "EmptyRun"},
}};

}  // namespace

std::string_view to_string(ErrorCode code) {
  if (code == ErrorCode::SchemaVersionMismatch) return "SchemaVersionMismatch";
  for (const auto& [c, name] : kErrorNames) {
    if (c == code) return name;
  }
  return "UnknownError";
}

std::optional<ErrorCode> error_code_from_string(std::string_view name) {
  if (name == "SchemaVersionMismatch") return ErrorCode::SchemaVersionMismatch;
  for (const auto& [c, n] : kErrorNames) {
    if (n == name) return c;
  }
  return std::nullopt;
}

std::string_view to_string(Perspective p) {
  switch (p) {
    case Perspective::Resonation: return "resonation";
    case Perspective::Expression: return "expression";
    case Perspective::Reception: return "reception";
    case Perspective::Bystander: return "bystander";
  }
  return "unknown";
}

std::optional<Perspective> perspective_from_string(std::string_view name) {
  for (Perspective p : kAllPerspectives) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

ScoreScale default_scale(Perspective p) {
  if (p == Perspective::Bystander) return {0.0, 100.0};
  return {1.0, 5.0};
}

std::string_view to_string(BackendKind kind) {
  return kind == BackendKind::Scripted ? "scripted" : "remote";
}

std::optional<BackendKind> backend_kind_from_string(std::string_view name) {
  if (name == "scripted") return BackendKind::Scripted;
  if (name == "remote") return BackendKind::Remote;
  return std::nullopt;
}

std::string trim_copy(std::string_view text) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  size_t begin = 0;
  size_t end = text.size();
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
  return std::string(text.substr(begin, end - begin));
}

int whitespace_token_count(std::string_view text) {
  int count = 0;
  bool in_token = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

Candidate make_candidate(std::string analysis, std::string response, const TokenCounter& counter) {
  Candidate candidate;
  candidate.analysis = std::move(analysis);
  candidate.response = std::move(response);
  candidate.response_length = counter(candidate.response);
  return candidate;
}

ScoreScale EngineConfig::scale_for(Perspective p) const {
  auto it = scales.find(p);
  return it != scales.end() ? it->second : default_scale(p);
}

DialogueCase validate_case(const DialogueCase& dialogue) {
  if (trim_copy(dialogue.id).empty()) {
    throw Error(ErrorCode::EmptyId, "dialogue case has an empty id");
  }
  if (trim_copy(dialogue.query).empty()) {
    throw Error(ErrorCode::EmptyQuery, "case '" + dialogue.id + "' has an empty query");
  }
  return dialogue;
}

EngineConfig validate_config(const EngineConfig& config) {
  EngineConfig out = config;

  bool any_empathy = std::any_of(out.enabled_perspectives.begin(), out.enabled_perspectives.end(),
                                 [](Perspective p) { return is_empathy(p); });
  if (!any_empathy) {
    throw Error(ErrorCode::NoEmpathyPerspective,
                "at least one of resonation/expression/reception must be enabled");
  }
  if (out.lambda_len > 0.0) {
    throw Error(ErrorCode::BadSign, "lambda_len must be <= 0");
  }
  if (out.lambda_bys < 0.0) {
    throw Error(ErrorCode::BadSign, "lambda_bys must be >= 0");
  }
  if (out.length_threshold_l < 0) {
    throw Error(ErrorCode::BadConfig, "length_threshold_l must be >= 0");
  }
  if (out.concurrency_limit < 1) {
    throw Error(ErrorCode::BadConfig, "concurrency_limit must be >= 1");
  }
  if (out.max_retries < 0) {
    throw Error(ErrorCode::BadConfig, "max_retries must be >= 0");
  }
  if (out.epsilon_std <= 0.0) {
    throw Error(ErrorCode::BadConfig, "epsilon_std must be > 0");
  }
  if (out.backend.timeout_s <= 0.0) {
    throw Error(ErrorCode::BadConfig, "backend.timeout_s must be > 0");
  }
  if (out.backend.backoff_base_ms < 1) {
    throw Error(ErrorCode::BadConfig, "backend.backoff_base_ms must be >= 1");
  }
  if (out.backend.temperature < 0.0) {
    throw Error(ErrorCode::BadConfig, "backend.temperature must be >= 0");
  }
  if (out.backend.max_output_tokens < 1) {
    throw Error(ErrorCode::BadConfig, "backend.max_output_tokens must be >= 1");
  }

  for (Perspective p : kAllPerspectives) {
    auto it = out.scales.find(p);
    if (it == out.scales.end()) {
      out.scales.emplace(p, default_scale(p));
    } else if (!(it->second.min < it->second.max)) {
      throw Error(ErrorCode::BadScale,
                  "scale for " + std::string(to_string(p)) + " must have min < max");
    }
  }
  return out;
}

}  // namespace perm
