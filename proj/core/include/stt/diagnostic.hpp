#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace stt {

// Source location. line/col are 1-based; line == 0 means "unknown".
struct Span {
  uint32_t line = 0;
  uint32_t col = 0;
  uint32_t len = 0;

  bool known() const { return line != 0; }
};

enum class DiagCode {
  SyntaxError,              // E001
  UnboundVariable,          // E002
  DuplicateName,            // E003
  ImportNotFound,           // E004
  ImportCycle,              // E005
  NotAFunction,             // E010
  TypeMismatch,             // E011
  BoundaryMismatch,         // E012
  TopeSideConditionFailed,  // E013
  IllFormedCubeTerm,        // E014
  SortMismatch,             // E015
  IllFormedTope,            // E016
  UniverseInUniverse,       // E017
  NotInferable,             // E018
  NotATerm,                 // E019
  OutOfRange,               // E020
  Overflow,                 // E021
  ArityMismatch,            // E022
  AtomOutOfUniverse,        // E023
  ManifestDrift,            // E024
  AnchorConflict,           // E025
};

// Stable numeric code, e.g. "E012".
std::string code_string(DiagCode c);
// Stable symbolic name, e.g. "BoundaryMismatch".
std::string code_name(DiagCode c);
// Inverse of code_name; throws std::invalid_argument on unknown names.
DiagCode code_from_name(const std::string& name);

struct Diagnostic {
  DiagCode code = DiagCode::SyntaxError;
  std::string file;  // may be empty for programmatic input
  Span span;
  std::string message;
  // Pretty-printed failed entailment for TopeSideConditionFailed /
  // BoundaryMismatch; empty otherwise.
  std::string entailment;
};

// Renders "file:line:col: error[Ennn]: message" (+ indented entailment).
// color adds ANSI escapes around the severity.
std::string render(const Diagnostic& d, bool color = false);

// Thrown by checker/frontend operations on the first error of a unit of
// work. Callers that want to keep going catch per declaration.
class CheckError : public std::runtime_error {
 public:
  explicit CheckError(Diagnostic d) : std::runtime_error(d.message), diag(std::move(d)) {}
  Diagnostic diag;
};

[[noreturn]] inline void fail(DiagCode code, std::string message, Span span = {},
                              std::string entailment = {}) {
  Diagnostic d;
  d.code = code;
  d.span = span;
  d.message = std::move(message);
  d.entailment = std::move(entailment);
  throw CheckError(std::move(d));
}

}  // namespace stt
