#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace summswap {

enum class ErrorKind {
  // corpus
  MissingField,
  MalformedDate,
  DuplicateId,
  InvalidFilter,
  // entity_swap
  DuplicateSourceForm,
  EmptyTargetList,
  EmptySourceForm,
  AmbiguousInverse,
  // summarizers
  EmptyText,
  AdapterTimeout,
  AdapterCrash,
  MissingResponse,
  UnknownId,
  ModelMismatch,
  InvalidAdapterConfig,
  // textsim
  BothEmpty,
  // features
  InvalidRegex,
  EmptyLexicon,
  UnknownCategory,
  InvalidRoster,
  // stats
  TooFewSamples,
  LengthMismatch,
  EmptyCorpus,
  InvalidPrior,
  TooFewScores,
  // report
  InconsistentFeatures,
  ShapeMismatch,
  MalformedTable,
  // generic
  IoFailure,
  ParseError,
  ValidationFailed,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingField: return "MissingField";
    case ErrorKind::MalformedDate: return "MalformedDate";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::InvalidFilter: return "InvalidFilter";
    case ErrorKind::DuplicateSourceForm: return "DuplicateSourceForm";
    case ErrorKind::EmptyTargetList: return "EmptyTargetList";
    case ErrorKind::EmptySourceForm: return "EmptySourceForm";
    case ErrorKind::AmbiguousInverse: return "AmbiguousInverse";
    case ErrorKind::EmptyText: return "EmptyText";
    case ErrorKind::AdapterTimeout: return "AdapterTimeout";
    case ErrorKind::AdapterCrash: return "AdapterCrash";
    case ErrorKind::MissingResponse: return "MissingResponse";
    case ErrorKind::UnknownId: return "UnknownId";
    case ErrorKind::ModelMismatch: return "ModelMismatch";
    case ErrorKind::InvalidAdapterConfig: return "InvalidAdapterConfig";
    case ErrorKind::BothEmpty: return "BothEmpty";
    case ErrorKind::InvalidRegex: return "InvalidRegex";
    case ErrorKind::EmptyLexicon: return "EmptyLexicon";
    case ErrorKind::UnknownCategory: return "UnknownCategory";
    case ErrorKind::InvalidRoster: return "InvalidRoster";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::InvalidPrior: return "InvalidPrior";
    case ErrorKind::TooFewScores: return "TooFewScores";
    case ErrorKind::InconsistentFeatures: return "InconsistentFeatures";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::MalformedTable: return "MalformedTable";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
  }
  return "Unknown";
}

/// Every failure raised by the library. The message is prefixed with the
/// owning module and the error kind, e.g. "corpus: MalformedDate: ...".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string_view module, const std::string& detail)
      : std::runtime_error(std::string(module) + ": " +
                           std::string(to_string(kind)) + ": " + detail),
        kind_(kind),
        module_(module) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

}  // namespace summswap
