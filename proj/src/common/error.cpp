#include "qdt/common/error.hpp"

namespace qdt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownProblemClass:
      return "UnknownProblemClass";
    case ErrorCode::SchemaViolation:
      return "SchemaViolation";
    case ErrorCode::UnknownMode:
      return "UnknownMode";
    case ErrorCode::LengthMismatch:
      return "LengthMismatch";
    case ErrorCode::TooLarge:
      return "TooLarge";
    case ErrorCode::InvalidDensity:
      return "InvalidDensity";
    case ErrorCode::NotGraphBased:
      return "NotGraphBased";
    case ErrorCode::InvalidMatrix:
      return "InvalidMatrix";
    case ErrorCode::UnknownNode:
      return "UnknownNode";
    case ErrorCode::DuplicateName:
      return "DuplicateName";
    case ErrorCode::MissingRoot:
      return "MissingRoot";
    case ErrorCode::InvalidConfig:
      return "InvalidConfig";
    case ErrorCode::InvalidPathKey:
      return "InvalidPathKey";
    case ErrorCode::NoViableChild:
      return "NoViableChild";
    case ErrorCode::UnknownTopic:
      return "UnknownTopic";
    case ErrorCode::UndeclaredWrite:
      return "UndeclaredWrite";
    case ErrorCode::UndeclaredRead:
      return "UndeclaredRead";
    case ErrorCode::MissingCreate:
      return "MissingCreate";
    case ErrorCode::MissingKey:
      return "MissingKey";
    case ErrorCode::NodeFailure:
      return "NodeFailure";
    case ErrorCode::NoDefaultAvailable:
      return "NoDefaultAvailable";
    case ErrorCode::AnswerTimeout:
      return "AnswerTimeout";
    case ErrorCode::RetriesExhausted:
      return "RetriesExhausted";
    case ErrorCode::UnanswerableQuery:
      return "UnanswerableQuery";
    case ErrorCode::InvalidAnswer:
      return "InvalidAnswer";
    case ErrorCode::AlreadyAnswered:
      return "AlreadyAnswered";
    case ErrorCode::UnknownQuery:
      return "UnknownQuery";
    case ErrorCode::UnknownRun:
      return "UnknownRun";
    case ErrorCode::UnknownBuilder:
      return "UnknownBuilder";
    case ErrorCode::MissingHyperParam:
      return "MissingHyperParam";
    case ErrorCode::OutOfRange:
      return "OutOfRange";
    case ErrorCode::DuplicateId:
      return "DuplicateId";
    case ErrorCode::UnknownBackend:
      return "UnknownBackend";
    case ErrorCode::TooManyQubits:
      return "TooManyQubits";
    case ErrorCode::SizeMismatch:
      return "SizeMismatch";
    case ErrorCode::InvalidCircuit:
      return "InvalidCircuit";
    case ErrorCode::EmptySchedule:
      return "EmptySchedule";
    case ErrorCode::InvalidDelta:
      return "InvalidDelta";
    case ErrorCode::ParamCountMismatch:
      return "ParamCountMismatch";
    case ErrorCode::NegativeEpsilon:
      return "NegativeEpsilon";
    case ErrorCode::OptimizerFailure:
      return "OptimizerFailure";
    case ErrorCode::Unimplemented:
      return "Unimplemented";
    case ErrorCode::EmptyDatabaseSlice:
      return "EmptyDatabaseSlice";
    case ErrorCode::InsufficientNoiseGrid:
      return "InsufficientNoiseGrid";
    case ErrorCode::NoCrossing:
      return "NoCrossing";
    case ErrorCode::NeverSucceeds:
      return "NeverSucceeds";
    case ErrorCode::DegenerateFit:
      return "DegenerateFit";
    case ErrorCode::InvalidRecord:
      return "InvalidRecord";
    case ErrorCode::DomainExceeded:
      return "DomainExceeded";
    case ErrorCode::IoFailure:
      return "IoFailure";
  }
  return "Unknown";
}

}  // namespace qdt
