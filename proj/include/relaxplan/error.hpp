#pragma once

#include <string>
#include <utility>
#include <variant>

namespace relaxplan {

enum class ErrCode {
  // scene files
  malformed_scene,
  dangling_reference,
  id_collision,
  // pddl text
  syntax,
  unsupported_feature,
  unknown_predicate,
  arity_mismatch,
  unknown_type,
  unknown_action,
  // planner
  grounding_explosion,
  // semantic backends
  backend,
  unparseable_output,
  retries_exhausted,
  no_alternative,
  nothing_to_relax,
  no_progress,
  // harness / cli
  config,
  layout,
  unknown_family,
  io,
};

inline const char* err_code_name(ErrCode c) {
  switch (c) {
    case ErrCode::malformed_scene: return "MalformedScene";
    case ErrCode::dangling_reference: return "DanglingReference";
    case ErrCode::id_collision: return "IdCollision";
    case ErrCode::syntax: return "SyntaxError";
    case ErrCode::unsupported_feature: return "UnsupportedFeature";
    case ErrCode::unknown_predicate: return "UnknownPredicate";
    case ErrCode::arity_mismatch: return "ArityMismatch";
    case ErrCode::unknown_type: return "UnknownType";
    case ErrCode::unknown_action: return "UnknownAction";
    case ErrCode::grounding_explosion: return "GroundingExplosion";
    case ErrCode::backend: return "BackendError";
    case ErrCode::unparseable_output: return "UnparseableOutput";
    case ErrCode::retries_exhausted: return "RetriesExhausted";
    case ErrCode::no_alternative: return "NoAlternative";
    case ErrCode::nothing_to_relax: return "NothingToRelax";
    case ErrCode::no_progress: return "NoProgress";
    case ErrCode::config: return "ConfigError";
    case ErrCode::layout: return "LayoutError";
    case ErrCode::unknown_family: return "UnknownFamily";
    case ErrCode::io: return "IoError";
  }
  return "Error";
}

struct Error {
  ErrCode code;
  std::string message;
  // source position, when the error refers to a text location
  int line = -1;
  int col = -1;
  // byte offset into the input, for scene-file errors
  long offset = -1;

  std::string describe() const {
    std::string s = err_code_name(code);
    s += ": ";
    s += message;
    return s;
  }
};

inline Error make_error(ErrCode code, std::string message) {
  return Error{code, std::move(message)};
}

/// Value-or-error return type used by every fallible operation.
template <typename T>
class Result {
 public:
  Result(T value) : data_(std::move(value)) {}          // NOLINT(google-explicit-constructor)
  Result(Error error) : data_(std::move(error)) {}      // NOLINT(google-explicit-constructor)

  bool ok() const { return std::holds_alternative<T>(data_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<T>(data_); }
  T& value() & { return std::get<T>(data_); }
  T&& take() && { return std::get<T>(std::move(data_)); }

  const Error& error() const { return std::get<Error>(data_); }

  ErrCode code() const { return error().code; }

 private:
  std::variant<T, Error> data_;
};

}  // namespace relaxplan
