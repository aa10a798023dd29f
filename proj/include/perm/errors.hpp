#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace perm {

enum class Perspective;

enum class ErrorCode {
  // validation
  EmptyQuery,
  EmptyId,
  NoEmpathyPerspective,
  BadScale,
  BadSign,
  BadConfig,
  // rubric
  UnknownPlaceholder,
  MissingAnalysis,
  MissingResponse,
  MissingResponseSection,
  NoScoreFound,
  ScoreOutOfRange,
  // judges
  TransportError,
  AuthMissing,
  Timeout,
  StorageError,
  // reward
  EmptyScores,
  OutOfScale,
  OutOfRange,
  DomainViolation,
  // harness
  MalformedLine,
  MissingField,
  DuplicateId,
  MissingResponseEntry,
  SchemaVersionMismatch,
  EmptyRun,
};

std::string_view to_string(ErrorCode code);
std::optional<ErrorCode> error_code_from_string(std::string_view name);

/// Engine-wide exception. `code()` identifies the failure class; judge and
/// parse failures raised while scoring carry the perspective they belong to.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Error(ErrorCode code, const std::string& message, Perspective perspective)
      : Error(code, message) {
    perspective_ = perspective;
  }

  ErrorCode code() const noexcept { return code_; }
  const std::optional<Perspective>& perspective() const noexcept { return perspective_; }

  Error with_perspective(Perspective p) const {
    Error out = *this;
    out.perspective_ = p;
    return out;
  }

 private:
  ErrorCode code_;
  std::optional<Perspective> perspective_;
};

}  // namespace perm
