#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qdt {

/// Machine-readable failure categories shared by every module.
enum class ErrorCode {
  // problem model
  UnknownProblemClass,
  SchemaViolation,
  UnknownMode,
  LengthMismatch,
  TooLarge,
  InvalidDensity,
  NotGraphBased,
  InvalidMatrix,
  // tree core
  UnknownNode,
  DuplicateName,
  MissingRoot,
  InvalidConfig,
  InvalidPathKey,
  NoViableChild,
  UnknownTopic,
  UndeclaredWrite,
  UndeclaredRead,
  MissingCreate,
  MissingKey,
  NodeFailure,
  // queries
  NoDefaultAvailable,
  AnswerTimeout,
  RetriesExhausted,
  UnanswerableQuery,
  InvalidAnswer,
  AlreadyAnswered,
  UnknownQuery,
  UnknownRun,
  // builders
  UnknownBuilder,
  MissingHyperParam,
  OutOfRange,
  // quantum backend
  DuplicateId,
  UnknownBackend,
  TooManyQubits,
  SizeMismatch,
  InvalidCircuit,
  // vqa runtime
  EmptySchedule,
  InvalidDelta,
  ParamCountMismatch,
  NegativeEpsilon,
  OptimizerFailure,
  Unimplemented,
  // scalability
  EmptyDatabaseSlice,
  InsufficientNoiseGrid,
  NoCrossing,
  NeverSucceeds,
  DegenerateFit,
  InvalidRecord,
  DomainExceeded,
  IoFailure,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace qdt
