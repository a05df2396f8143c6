#pragma once

// Shared syntax for the three layers: cube terms, topes, and the dependent
// type layer. All nodes are immutable after construction and shared by
// pointer; structural operations return fresh trees.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stt/diagnostic.hpp"

namespace stt {

// ---------------------------------------------------------------------------
// Cube shapes

class CubeShape;
using CubeShapePtr = std::shared_ptr<const CubeShape>;

// Finite products of the directed interval I and the unit cube.
// Products are binary; the surface syntax 2*2*2 nests to the right.
class CubeShape {
 public:
  enum class Tag { Unit, Interval, Product };

  static const CubeShapePtr& unit();
  static const CubeShapePtr& interval();
  static CubeShapePtr product(CubeShapePtr lhs, CubeShapePtr rhs);
  static CubeShapePtr power(int n);  // I^n, right-nested; power(0) = unit

  Tag tag;
  CubeShapePtr lhs, rhs;  // Product only

  explicit CubeShape(Tag t) : tag(t) {}
};

bool cube_shape_equal(const CubeShape& a, const CubeShape& b);

// Projection path to a sub-cube: 1 = first component, 2 = second.
using Path = std::vector<uint8_t>;

// Paths of all Interval leaves, leftmost first.
std::vector<Path> interval_paths(const CubeShape& c);
// Sub-shape at a path; nullptr when the path leaves the tree.
const CubeShape* subshape_at(const CubeShape& c, const Path& p);

// Forward declaration; see below.
class CubeTerm;
using CubeTermPtr = std::shared_ptr<const CubeTerm>;

// Projection chain selecting interval leaf `leaf` (in interval_paths
// order) of variable `var_index` of the given shape.
CubeTermPtr leaf_term(const CubeShape& shape, int leaf, int var_index = 0);

// ---------------------------------------------------------------------------
// Cube terms

// Var indices are de Bruijn over the binder telescope of a TriContext
// (cube and type binders count; tope hypotheses do not).
class CubeTerm {
 public:
  enum class Tag { Var, Star, Zero, One, Pair, Proj };

  Tag tag;
  int index = 0;       // Var
  uint8_t which = 0;   // Proj: 1 or 2
  CubeTermPtr a, b;    // Pair: both; Proj: a

  static CubeTermPtr var(int index);
  static const CubeTermPtr& star();
  static const CubeTermPtr& zero();
  static const CubeTermPtr& one();
  static CubeTermPtr pair(CubeTermPtr fst, CubeTermPtr snd);
  static CubeTermPtr proj(uint8_t which, CubeTermPtr of);

  explicit CubeTerm(Tag t) : tag(t) {}
};

bool cube_term_equal(const CubeTerm& a, const CubeTerm& b);

// ---------------------------------------------------------------------------
// Topes

class Tope;
using TopePtr = std::shared_ptr<const Tope>;

// Coherent logic over cube terms: no negation, implication or quantifiers.
class Tope {
 public:
  enum class Tag { Top, Bot, And, Or, Eq, Leq };

  Tag tag;
  TopePtr l, r;       // And / Or
  CubeTermPtr s, t;   // Eq / Leq

  static const TopePtr& top();
  static const TopePtr& bot();
  static TopePtr conj(TopePtr l, TopePtr r);
  static TopePtr disj(TopePtr l, TopePtr r);
  static TopePtr eq(CubeTermPtr s, CubeTermPtr t);
  static TopePtr leq(CubeTermPtr s, CubeTermPtr t);

  explicit Tope(Tag tg) : tag(tg) {}
};

bool tope_equal(const Tope& a, const Tope& b);

// ---------------------------------------------------------------------------
// Expressions (dependent type layer)

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Per-tag payload:
//   Var      var_index
//   Universe -
//   Pi       binder, e1 = domain, e2 = codomain (binds)
//   Sigma    binder, e1 = domain, e2 = codomain (binds)
//   Id       e1 = type, e2 = lhs, e3 = rhs
//   Lam      binder, leaves, e1 = body (binds; binder sort comes from the
//            classifier: a type binder under Pi, a cube binder under Ext)
//   App      e1 = fn, e2 = argument (type application)
//   Pair     e1, e2 (checked against Sigma)
//   Fst/Snd  e1
//   Refl     - (checked against Id A a b with a == b)
//   J        - (constant; see checker for its type and reduction)
//   Ext      binder, leaves, cube, tope1 = domain tope, tope2 = boundary
//            tope, e1 = family, e2 = boundary section (all four bind one
//            cube variable; the topes may only mention that variable)
//   ExtApp   e1 = fn, cterm = cube argument
//   RecBot   -
//   RecOr    tope1/tope2 = guards (in the ambient context), e1/e2 = branches
//   Const    cname (reference to a global declaration)
//   CubeE    cterm (a cube term in expression position; the checker resolves
//            these into ExtApp arguments)
class Expr {
 public:
  enum class Tag {
    Var, Universe, Pi, Sigma, Id, Lam, App, Pair, Fst, Snd,
    Refl, J, Ext, ExtApp, RecBot, RecOr, Const, CubeE,
  };

  Tag tag;
  Span span{};
  int var_index = 0;
  std::string binder;               // display only; ignored by alpha_equal
  std::vector<std::string> leaves;  // display names for interval leaves
  std::string cname;
  ExprPtr e1, e2, e3;
  CubeShapePtr cube;
  TopePtr tope1, tope2;
  CubeTermPtr cterm;

  explicit Expr(Tag t) : tag(t) {}
};

namespace mk {
ExprPtr var(int index);
ExprPtr universe();
ExprPtr pi(std::string binder, ExprPtr domain, ExprPtr codomain);
ExprPtr sigma(std::string binder, ExprPtr domain, ExprPtr codomain);
ExprPtr id(ExprPtr type, ExprPtr lhs, ExprPtr rhs);
ExprPtr lam(std::string binder, ExprPtr body);
ExprPtr lam(std::string binder, std::vector<std::string> leaves, ExprPtr body);
ExprPtr app(ExprPtr fn, ExprPtr arg);
ExprPtr pair(ExprPtr fst, ExprPtr snd);
ExprPtr fst(ExprPtr p);
ExprPtr snd(ExprPtr p);
ExprPtr refl();
ExprPtr jelim();
ExprPtr ext(std::string binder, std::vector<std::string> leaves, CubeShapePtr cube,
            TopePtr domain_tope, TopePtr boundary_tope, ExprPtr family, ExprPtr boundary);
ExprPtr ext_app(ExprPtr fn, CubeTermPtr arg);
ExprPtr rec_bot();
ExprPtr rec_or(TopePtr left_guard, TopePtr right_guard, ExprPtr left, ExprPtr right);
ExprPtr cnst(std::string name);
ExprPtr cube_term(CubeTermPtr t);
ExprPtr with_span(ExprPtr e, Span s);
}  // namespace mk

// Structural equality up to binder names and spans.
bool alpha_equal(const Expr& a, const Expr& b);

// ---------------------------------------------------------------------------
// Contexts

// The three-layer context is one telescope whose entries are cube binders,
// tope hypotheses, and type binders. De Bruijn indices count binders only.
class TriContext {
 public:
  struct CubeBinder {
    std::string name;
    std::vector<std::string> leaf_names;  // aligned with interval_paths
    CubeShapePtr shape;
  };
  struct TopeHyp {
    TopePtr tope;
    int binders_before;  // binder depth at which the hypothesis was added
  };
  struct TypeBinder {
    std::string name;
    ExprPtr type;  // well formed in the prefix before this binder
  };
  using Entry = std::variant<CubeBinder, TopeHyp, TypeBinder>;

  TriContext() = default;

  TriContext extended_cube(std::string name, CubeShapePtr shape,
                           std::vector<std::string> leaf_names = {}) const;
  TriContext extended_tope(TopePtr tope) const;
  TriContext extended_type(std::string name, ExprPtr type) const;

  int binder_depth() const { return static_cast<int>(binder_entries_.size()); }
  // Entry for de Bruijn index i (0 = innermost binder).
  const Entry& binder(int index) const;
  // Binder depth in front of binder `index` (number of enclosing binders).
  int binders_before(int index) const;

  const std::vector<Entry>& entries() const { return entries_; }

  // All tope hypotheses, with indices shifted to the current depth.
  std::vector<TopePtr> hypotheses() const;

  // Interval atoms (as level/path pairs) of every cube binder in scope.
  // level = binders_before(binder), stable as the context grows.
  struct LeafAtom {
    int level;
    Path path;
    std::string display;
  };
  std::vector<LeafAtom> interval_atoms() const;

  // Display name for binder `index` (may synthesize one).
  std::string display_name(int index) const;

 private:
  std::vector<Entry> entries_;
  std::vector<int> binder_entries_;  // positions of binders, outermost first
};

// ---------------------------------------------------------------------------
// Shift and substitution
//
// shift adds `by` to every variable index >= cutoff. substitute replaces
// binder index `index` and renumbers the variables above it down by one.
// Substituting an Expr where a cube variable occurs (inside a cube term or
// tope) raises SortMismatch; the converse direction wraps the cube term.

CubeTermPtr shift(const CubeTermPtr& t, int by, int cutoff = 0);
TopePtr shift(const TopePtr& t, int by, int cutoff = 0);
ExprPtr shift(const ExprPtr& e, int by, int cutoff = 0);

using SubstArg = std::variant<ExprPtr, CubeTermPtr>;

CubeTermPtr substitute(const CubeTermPtr& target, int index, const SubstArg& value);
TopePtr substitute(const TopePtr& target, int index, const SubstArg& value);
ExprPtr substitute(const ExprPtr& target, int index, const SubstArg& value);

// Instantiates the bound variable of a binder body with `value`. The value
// and the result both live in the context outside the binder.
ExprPtr open_binder(const ExprPtr& body, const SubstArg& value);
TopePtr open_binder(const TopePtr& body, const CubeTermPtr& value);

// ---------------------------------------------------------------------------
// Cube sorting and normalization

// Sort of a cube term; raises IllFormedCubeTerm when the term projects a
// non-product or references a non-cube binder.
CubeShapePtr cube_sort(const TriContext& ctx, const CubeTermPtr& t);

// Beta-eta-normal form: Star at Unit, Pair of normals at products, and at
// Interval either Zero, One, or a projection chain ending in a variable.
CubeTermPtr normalize_cube(const TriContext& ctx, const CubeTermPtr& t);

// True when `t` is in normal form for its sort.
bool cube_normal(const TriContext& ctx, const CubeTermPtr& t);

// Checks a tope: every cube variable resolves to a cube binder, Eq relates
// terms of one sort, Leq only relates Interval terms.
void check_tope(const TriContext& ctx, const TopePtr& t);

// ---------------------------------------------------------------------------
// Rendering (diagnostics; the full printer lives in the frontend)

// ASCII form using the display names of ctx: "(t.1, t.2)", "p.2 <= p.1".
std::string render_cube_term(const TriContext& ctx, const CubeTermPtr& t);
// "/\\" binds tighter than "\\/"; atoms need no parentheses.
std::string render_tope(const TriContext& ctx, const TopePtr& t);
// "h1, h2 |- goal"; hypotheses may be empty.
std::string render_entailment(const TriContext& ctx, const std::vector<TopePtr>& hyps,
                              const TopePtr& goal);

}  // namespace stt
