#include "stt/diagnostic.hpp"

#include <array>

namespace stt {

namespace {

struct CodeInfo {
  DiagCode code;
  const char* num;
  const char* name;
};

constexpr std::array<CodeInfo, 21> kCodes{{
    {DiagCode::SyntaxError, "E001", "SyntaxError"},
    {DiagCode::UnboundVariable, "E002", "UnboundVariable"},
    {DiagCode::DuplicateName, "E003", "DuplicateName"},
    {DiagCode::ImportNotFound, "E004", "ImportNotFound"},
    {DiagCode::ImportCycle, "E005", "ImportCycle"},
    {DiagCode::NotAFunction, "E010", "NotAFunction"},
    {DiagCode::TypeMismatch, "E011", "TypeMismatch"},
    {DiagCode::BoundaryMismatch, "E012", "BoundaryMismatch"},
    {DiagCode::TopeSideConditionFailed, "E013", "TopeSideConditionFailed"},
    {DiagCode::IllFormedCubeTerm, "E014", "IllFormedCubeTerm"},
    {DiagCode::SortMismatch, "E015", "SortMismatch"},
    {DiagCode::IllFormedTope, "E016", "IllFormedTope"},
    {DiagCode::UniverseInUniverse, "E017", "UniverseInUniverse"},
    {DiagCode::NotInferable, "E018", "NotInferable"},
    {DiagCode::NotATerm, "E019", "NotATerm"},
    {DiagCode::OutOfRange, "E020", "OutOfRange"},
    {DiagCode::Overflow, "E021", "Overflow"},
    {DiagCode::ArityMismatch, "E022", "ArityMismatch"},
    {DiagCode::AtomOutOfUniverse, "E023", "AtomOutOfUniverse"},
    {DiagCode::ManifestDrift, "E024", "ManifestDrift"},
    {DiagCode::AnchorConflict, "E025", "AnchorConflict"},
}};

const CodeInfo& info(DiagCode c) {
  for (const auto& ci : kCodes)
    if (ci.code == c) return ci;
  return kCodes[0];
}

}  // namespace

std::string code_string(DiagCode c) { return info(c).num; }
std::string code_name(DiagCode c) { return info(c).name; }

DiagCode code_from_name(const std::string& name) {
  for (const auto& ci : kCodes)
    if (name == ci.name || name == ci.num) return ci.code;
  throw std::invalid_argument("unknown diagnostic code: " + name);
}

std::string render(const Diagnostic& d, bool color) {
  std::string out;
  if (!d.file.empty()) {
    out += d.file;
    out += ':';
    if (d.span.known()) {
      out += std::to_string(d.span.line);
      out += ':';
      out += std::to_string(d.span.col);
      out += ':';
    }
    out += ' ';
  }
  if (color) out += "\x1b[31m";
  out += "error[" + code_string(d.code) + "]";
  if (color) out += "\x1b[0m";
  out += ": ";
  out += d.message;
  if (!d.entailment.empty()) {
    out += "\n  failed entailment: ";
    out += d.entailment;
  }
  return out;
}

}  // namespace stt
