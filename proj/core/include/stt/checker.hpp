#pragma once

// Bidirectional checker for the dependent layer. Introduction forms are
// checked against a classifier, eliminators and constants infer, and
// definitional equality is type-directed: eta at Pi, Sigma and extension
// types, beta plus delta unfolding through weak-head normal forms, and
// tope-aware comparison of cube arguments. A judgment holds outright
// whenever the tope context is inconsistent.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stt/shape.hpp"
#include "stt/solver.hpp"
#include "stt/syntax.hpp"

namespace stt {

// A global declaration. Definitions unfold during weak-head reduction,
// postulates stay neutral, shape aliases name a cube/tope pair and are
// resolved away by the frontend before terms reach the checker.
struct Declaration {
  enum class Kind { Definition, Postulate, ShapeAlias };

  Kind kind = Kind::Definition;
  std::string name;
  ExprPtr type;                // Definition / Postulate: closed
  ExprPtr body;                // Definition: closed, checks at `type`
  std::optional<Shape> shape;  // ShapeAlias
  std::vector<std::string> shape_leaves;  // ShapeAlias leaf display names
  std::string file;
  Span span{};
};

class Environment {
 public:
  // nullptr when absent.
  const Declaration* find(const std::string& name) const;
  // DuplicateName when taken.
  void declare(Declaration d);
  const std::vector<Declaration>& declarations() const { return decls_; }

 private:
  std::vector<Declaration> decls_;
  std::map<std::string, size_t> index_;
};

class Checker {
 public:
  Checker(const Environment& env, Solver& solver) : env_(env), solver_(solver) {}

  // `e` is a well-formed type: a universe, a former over well-formed
  // parts, or an element of U.
  void check_type(const TriContext& ctx, const ExprPtr& e);

  // Checking consumes introduction forms; anything else infers and the
  // types are compared.
  void check(const TriContext& ctx, const ExprPtr& e, const ExprPtr& type);
  ExprPtr infer(const TriContext& ctx, const ExprPtr& e);

  // Judgmental equality at a type. Both sides must already check at it.
  bool def_equal(const TriContext& ctx, const ExprPtr& a, const ExprPtr& b,
                 const ExprPtr& type);

  // Weak-head normal form: beta, projections, definition unfolding, J on
  // refl, extension beta and boundary collapse, rec-or guard resolution.
  ExprPtr whnf(const TriContext& ctx, const ExprPtr& e);

  // Eta-long beta normal form, type-directed. `type` must classify `e`.
  ExprPtr normalize(const TriContext& ctx, const ExprPtr& e, const ExprPtr& type);
  // Normal form of a type.
  ExprPtr normalize_type(const TriContext& ctx, const ExprPtr& t);

  // Cube term denoted by an expression (variables bound to cube binders,
  // literal cube terms, tuples and projections of such); NotATerm on
  // anything else.
  CubeTermPtr expr_to_cube(const TriContext& ctx, const ExprPtr& e);

  // Closed type of the identity eliminator:
  // (A : U) -> (a : A) -> (C : (y : A) -> Id A a y -> U) ->
  // C a refl -> (b : A) -> (p : Id A a b) -> C b p.
  static const ExprPtr& j_rule_type();

 private:
  // Shared validation of extension formers. `small` additionally requires
  // the family to be U-small.
  void validate_ext(const TriContext& ctx, const ExprPtr& e, bool small);
  // Structural equality of weak-head types.
  bool type_equal(const TriContext& ctx, const ExprPtr& a, const ExprPtr& b);
  // Equality at a base classifier (Id or neutral type); inputs whnf'd.
  bool equal_base(const TriContext& ctx, const ExprPtr& a, const ExprPtr& b,
                  const ExprPtr& type);
  // Spine comparison; the common type on success, nullopt on mismatch.
  std::optional<ExprPtr> neutral_equal(const TriContext& ctx, const ExprPtr& a,
                                       const ExprPtr& b);
  // Type of a weak-head neutral, without re-checking arguments; nullptr
  // when `e` is not neutral.
  ExprPtr neutral_type(const TriContext& ctx, const ExprPtr& e);
  // Innermost stuck rec-or along the head spine, if any.
  const Expr* stuck_rec_or(const TriContext& ctx, const ExprPtr& e);
  // Entailment against the hypotheses of ctx, with memoized branches.
  bool holds(const TriContext& ctx, const TopePtr& goal);
  ExprPtr normalize_neutral(const TriContext& ctx, const ExprPtr& e, ExprPtr* type_out);

  const Environment& env_;
  Solver& solver_;
};

// Checks `d` against `env` and appends it. DuplicateName before any
// checking; checking errors carry the declaration's file and span.
void check_declaration(Environment& env, Solver& solver, Declaration d);

}  // namespace stt
