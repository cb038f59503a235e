#pragma once

#include <stdexcept>
#include <string>

namespace pbt {

// Input is malformed (bad syntax, unknown name, wrong arity, ...): CLI exit 2.
struct ParseError : std::runtime_error {
  int line = 0;
  int col = 0;
  ParseError(const std::string& msg, int line_ = 0, int col_ = 0)
      : std::runtime_error(line_ ? msg + " (line " + std::to_string(line_) +
                                       ", column " + std::to_string(col_) + ")"
                                 : msg),
        line(line_),
        col(col_) {}
};

struct ArityError : ParseError {
  using ParseError::ParseError;
};

struct UnboundPredicate : ParseError {
  using ParseError::ParseError;
};

// Runtime failures of the engine/kernel/harness: CLI exit 3.
struct EngineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A unification problem fell outside the higher-order pattern fragment.
struct NonPatternProblem : EngineError {
  using EngineError::EngineError;
};

// The step budget was consumed before the search finished.
struct FuelExhausted : EngineError {
  FuelExhausted() : EngineError("fuel exhausted") {}
  explicit FuelExhausted(const std::string& what) : EngineError(what) {}
};

// Negation-as-failure was asked about a goal with free variables.
struct NonGroundNegation : EngineError {
  using EngineError::EngineError;
};

// Shrinking is only available for purely positive (Horn) programs.
struct ShrinkUnsupported : EngineError {
  using EngineError::EngineError;
};

// A compiled clause body did not have the shape an FPC relies on.
struct MalformedBody : EngineError {
  using EngineError::EngineError;
};

// A certificate term did not fit the FPC that was asked to interpret it.
struct BadCertificate : EngineError {
  using EngineError::EngineError;
};

}  // namespace pbt
