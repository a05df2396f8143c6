#pragma once

// Decision procedure for the tope layer over the strict interval. Complete
// because every model of a hypothesis set restricts to a weak total order
// of its atoms with 0 bottom and 1 top: hypotheses go to disjunctive
// normal form, each disjunct is saturated (congruence closure for
// equality, transitive closure for order, antisymmetry merges, endpoint
// axioms), and every pair of classes is then decided both ways, merged or
// strictly ordered, enumerating exactly the refining weak total orders.
// A goal is entailed iff it holds in every one of them.

#include <compare>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "stt/syntax.hpp"

namespace stt {

// Interval atom: a constant endpoint or an interval leaf of a cube binder,
// identified by (level, projection path). level = number of binders in
// front of the referenced binder, which does not change as the context
// grows inward.
struct ITerm {
  enum class K { Zero, One, Var };
  K k = K::Zero;
  int level = 0;
  Path path;

  static ITerm zero() { return ITerm{}; }
  static ITerm one() { return ITerm{K::One, 0, {}}; }
  static ITerm var(int level, Path path) { return ITerm{K::Var, level, std::move(path)}; }

  // Fixed term order: Zero < One < variables by (level, path); an earlier
  // bound variable is smaller.
  friend std::strong_ordering operator<=>(const ITerm& a, const ITerm& b);
  friend bool operator==(const ITerm& a, const ITerm& b) = default;
};

// One saturated total preorder of an atom universe. Immutable.
class Branch {
 public:
  const std::vector<ITerm>& universe() const { return universe_; }
  bool consistent() const { return consistent_; }
  bool contains(const ITerm& t) const { return index_of(t) >= 0; }

  // Throw AtomOutOfUniverse when an argument is not in the universe.
  bool same_class(const ITerm& a, const ITerm& b) const;
  bool leq(const ITerm& a, const ITerm& b) const;
  // Least member of the class of `t` in the fixed term order.
  ITerm canonical_rep(const ITerm& t) const;
  // Position of the class of `t` in the chain, 0 = bottom. Only meaningful
  // for consistent (total) branches.
  int chain_rank(const ITerm& t) const;

  // Deterministic text form (used for deduplication and tests).
  std::string signature() const;

 private:
  friend class Solver;
  friend struct BranchFactory;
  int index_of(const ITerm& t) const;
  int must_index(const ITerm& t) const;

  std::vector<ITerm> universe_;  // sorted by the fixed term order
  std::vector<int> root_;        // class representative index per element
  std::vector<int> rank_;        // chain position per element's class
  bool consistent_ = true;
};

ITerm canonical_rep(const Branch& b, const ITerm& t);

class Solver {
 public:
  // Entailment of goal from the tope hypotheses of ctx plus extra.
  // Topes must be well formed in ctx (check_tope).
  bool entails(const TriContext& ctx, const std::vector<TopePtr>& extra, const TopePtr& goal);
  bool entails(const TriContext& ctx, const TopePtr& goal);

  // Definitional equality of two cube terms of one sort under the
  // hypotheses of ctx (tope equality is judgmental equality).
  bool cube_equal(const TriContext& ctx, const CubeTermPtr& s, const CubeTermPtr& t);

  // Every weak total order refining the hypotheses over the full atom
  // universe of ctx (all interval leaves of all cube binders, plus the
  // endpoints). Inconsistent hypotheses yield the empty list.
  std::vector<Branch> saturate_branches(const TriContext& ctx, const std::vector<TopePtr>& hyps);

  // Rendered falsifying branch, or nullopt when the goal is entailed.
  // Deterministic: the first failing branch in enumeration order.
  std::optional<std::string> countermodel(const TriContext& ctx,
                                          const std::vector<TopePtr>& hyps,
                                          const TopePtr& goal);

  void clear_cache();
  size_t cache_size() const;

  static Solver& global();

 private:
  struct Key {
    std::string text;
    bool operator<(const Key& o) const { return text < o.text; }
  };
  std::map<Key, std::shared_ptr<const std::vector<Branch>>> cache_;
  mutable std::mutex mu_;
};

// Branch rendered with the display names of ctx, as a chain
// "0 ≡ x < y < 1" (ASCII: "0 === x < y < 1").
std::string render_branch(const TriContext& ctx, const Branch& b);

}  // namespace stt
