#pragma once

// Surface syntax: lexer, parser, printer, and the import-resolving loader.
//
// The concrete syntax is ASCII-first with Unicode aliases:
//   topes        TOP BOT /\ \/ === <=        (⊤ ⊥ ∧ ∨ ≡ ≤)
//   cubes        2 (or I or 𝟚), products 2*2*2 flattening right
//   shapes       {t : 2 | phi} and {(t1,t2) : 2*2 | phi}
//   extension    <{t : 2 | psi} -> A [phi |-> a]>, written without the
//                angle brackets and boundary clause when phi is BOT
//   terms        \x -> e, f a, (a, b), fst, snd, Id A x y, refl, J,
//                recOR(phi |-> a, psi |-> b, ...), recBOT, U
//   declarations def NAME (x : T) ... : T := e | def NAME := {shape} |
//                postulate NAME (x : T) ... : T | import "path"
// Line comments start with --.

#include <string>
#include <vector>

#include "stt/checker.hpp"
#include "stt/shape.hpp"

namespace stt {

struct ParsedModule {
  std::string path;
  std::vector<std::string> imports;  // as written, in order
  std::vector<Span> import_spans;    // aligned with imports
  std::vector<Declaration> declarations;
  std::vector<Diagnostic> diagnostics;  // parse errors; one per skipped region
};

// Parses a module. Never throws: syntax errors are reported in
// `diagnostics` and parsing resumes at the next declaration keyword.
ParsedModule parse_module(const std::string& text, const std::string& file);

// Parses one closed term (or type). Throws CheckError on syntax errors.
ExprPtr parse_term_text(const std::string& text);

// Printing. Deterministic, minimal parentheses; parse(print(x)) is
// alpha-equal to x.
std::string print_term(const ExprPtr& e);
std::string print_declaration(const Declaration& d);
std::string print_module(const ParsedModule& m);

// Context binding a shape alias pattern: one name binds the whole cube,
// several names bind the interval leaves.
TriContext shape_pattern_context(const std::vector<std::string>& pattern,
                                 const CubeShapePtr& cube);

// Shape rendered as a parseable literal, "{(t1,t2) : 2*2 | t2 <= t1}".
std::string print_shape(const Shape& s);

// Rewrites Pi types whose domain names a shape alias into extension types
// over that shape (with empty boundary), recursively.
ExprPtr resolve_shape_domains(const Environment& env, const ExprPtr& e);

// A parsed entailment query "x:2,y:2 | x<=y, y<=x |- x===y".
struct SolveQuery {
  TriContext ctx;
  std::vector<CubeShapePtr> cubes;  // binder cubes, outermost first
  std::vector<TopePtr> hyps;
  TopePtr goal;
};

// Throws CheckError (SyntaxError) on malformed queries.
SolveQuery parse_solve_query(const std::string& text);

// Loads a file and, depth-first, everything it imports, checking each
// declaration into the shared environment. Paths in import directives are
// resolved relative to the importing file. Errors (syntax, import, check)
// accumulate as diagnostics; checking continues with the next declaration.
class Loader {
 public:
  Loader(Environment& env, Solver& solver) : env_(env), solver_(solver) {}

  // True when the file loaded without adding any diagnostics.
  bool load(const std::string& path);

  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  void load_rec(const std::string& path, const Span& at, const std::string& importer);

  Environment& env_;
  Solver& solver_;
  std::vector<Diagnostic> diags_;
  std::vector<std::string> done_;   // canonical paths, fully loaded
  std::vector<std::string> stack_;  // canonical paths, load in progress
};

}  // namespace stt
