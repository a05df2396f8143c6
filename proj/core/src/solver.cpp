#include "stt/solver.hpp"

#include <algorithm>
#include <set>

namespace stt {

std::strong_ordering operator<=>(const ITerm& a, const ITerm& b) {
  if (auto c = a.k <=> b.k; c != 0) return c;
  if (a.k != ITerm::K::Var) return std::strong_ordering::equal;
  if (auto c = a.level <=> b.level; c != 0) return c;
  return a.path <=> b.path;
}

// ---------------------------------------------------------------------------
// Branch

int Branch::index_of(const ITerm& t) const {
  auto it = std::lower_bound(universe_.begin(), universe_.end(), t);
  if (it == universe_.end() || !(*it == t)) return -1;
  return static_cast<int>(it - universe_.begin());
}

int Branch::must_index(const ITerm& t) const {
  int i = index_of(t);
  if (i < 0)
    fail(DiagCode::AtomOutOfUniverse, "atom is not part of this branch's universe");
  return i;
}

bool Branch::same_class(const ITerm& a, const ITerm& b) const {
  return root_[must_index(a)] == root_[must_index(b)];
}

bool Branch::leq(const ITerm& a, const ITerm& b) const {
  return rank_[must_index(a)] <= rank_[must_index(b)];
}

ITerm Branch::canonical_rep(const ITerm& t) const {
  int r = root_[must_index(t)];
  // universe_ is sorted, so the first member of the class is the least.
  for (size_t i = 0; i < universe_.size(); ++i)
    if (root_[i] == r) return universe_[i];
  return t;  // unreachable
}

int Branch::chain_rank(const ITerm& t) const { return rank_[must_index(t)]; }

static std::string iterm_text(const ITerm& t) {
  switch (t.k) {
    case ITerm::K::Zero:
      return "0";
    case ITerm::K::One:
      return "1";
    case ITerm::K::Var: {
      std::string s = "v" + std::to_string(t.level);
      for (uint8_t p : t.path) s += p == 1 ? ".1" : ".2";
      return s;
    }
  }
  return "?";
}

std::string Branch::signature() const {
  std::string out = consistent_ ? "c:" : "i:";
  for (size_t i = 0; i < universe_.size(); ++i) {
    out += iterm_text(universe_[i]);
    out += '=';
    out += std::to_string(root_[i]);
    out += '@';
    out += std::to_string(rank_[i]);
    out += ';';
  }
  return out;
}

ITerm canonical_rep(const Branch& b, const ITerm& t) { return b.canonical_rep(t); }

// Grants the file-local saturation machinery access to Branch internals.
struct BranchFactory {
  static Branch make(std::vector<ITerm> universe, std::vector<int> root,
                     std::vector<int> rank, bool consistent) {
    Branch b;
    b.universe_ = std::move(universe);
    b.root_ = std::move(root);
    b.rank_ = std::move(rank);
    b.consistent_ = consistent;
    return b;
  }
};

// ---------------------------------------------------------------------------
// Atomized topes

namespace {

struct ATope;
using ATopePtr = std::shared_ptr<const ATope>;

struct ATope {
  enum class Tag { Top, Bot, And, Or, Eq, Leq };
  Tag tag;
  ATopePtr l, r;
  ITerm s, t;
};

ATopePtr anode(ATope::Tag tag, ATopePtr l = nullptr, ATopePtr r = nullptr) {
  auto a = std::make_shared<ATope>();
  a->tag = tag;
  a->l = std::move(l);
  a->r = std::move(r);
  return a;
}

ATopePtr alit(ATope::Tag tag, ITerm s, ITerm t) {
  auto a = std::make_shared<ATope>();
  a->tag = tag;
  a->s = std::move(s);
  a->t = std::move(t);
  return a;
}

// Interval-sorted normal cube term -> atom.
ITerm to_atom(const TriContext& ctx, const CubeTermPtr& t) {
  switch (t->tag) {
    case CubeTerm::Tag::Zero:
      return ITerm::zero();
    case CubeTerm::Tag::One:
      return ITerm::one();
    default: {
      Path rev;
      const CubeTerm* cur = t.get();
      while (cur->tag == CubeTerm::Tag::Proj) {
        rev.push_back(cur->which);
        cur = cur->a.get();
      }
      if (cur->tag != CubeTerm::Tag::Var)
        fail(DiagCode::IllFormedCubeTerm, "interval term does not normalize to an atom");
      Path path(rev.rbegin(), rev.rend());
      return ITerm::var(ctx.binders_before(cur->index), std::move(path));
    }
  }
}

// Componentwise decomposition of an equality of normal terms of one sort.
ATopePtr decompose_eq(const TriContext& ctx, const CubeTermPtr& s, const CubeTermPtr& t,
                      const CubeShape& sort) {
  switch (sort.tag) {
    case CubeShape::Tag::Unit:
      return anode(ATope::Tag::Top);
    case CubeShape::Tag::Interval:
      return alit(ATope::Tag::Eq, to_atom(ctx, s), to_atom(ctx, t));
    case CubeShape::Tag::Product:
      return anode(ATope::Tag::And, decompose_eq(ctx, s->a, t->a, *sort.lhs),
                   decompose_eq(ctx, s->b, t->b, *sort.rhs));
  }
  return anode(ATope::Tag::Top);
}

ATopePtr atomize(const TriContext& ctx, const TopePtr& tope) {
  switch (tope->tag) {
    case Tope::Tag::Top:
      return anode(ATope::Tag::Top);
    case Tope::Tag::Bot:
      return anode(ATope::Tag::Bot);
    case Tope::Tag::And:
      return anode(ATope::Tag::And, atomize(ctx, tope->l), atomize(ctx, tope->r));
    case Tope::Tag::Or:
      return anode(ATope::Tag::Or, atomize(ctx, tope->l), atomize(ctx, tope->r));
    case Tope::Tag::Eq: {
      CubeShapePtr sort = cube_sort(ctx, tope->s);
      return decompose_eq(ctx, normalize_cube(ctx, tope->s), normalize_cube(ctx, tope->t),
                          *sort);
    }
    case Tope::Tag::Leq:
      return alit(ATope::Tag::Leq, to_atom(ctx, normalize_cube(ctx, tope->s)),
                  to_atom(ctx, normalize_cube(ctx, tope->t)));
  }
  return anode(ATope::Tag::Top);
}

void collect_atoms(const ATope& a, std::vector<ITerm>& out) {
  switch (a.tag) {
    case ATope::Tag::Top:
    case ATope::Tag::Bot:
      return;
    case ATope::Tag::And:
    case ATope::Tag::Or:
      collect_atoms(*a.l, out);
      collect_atoms(*a.r, out);
      return;
    case ATope::Tag::Eq:
    case ATope::Tag::Leq:
      out.push_back(a.s);
      out.push_back(a.t);
      return;
  }
}

struct Lit {
  bool eq;  // true: s == t, false: s <= t
  ITerm s, t;

  friend std::strong_ordering operator<=>(const Lit&, const Lit&) = default;
  friend bool operator==(const Lit&, const Lit&) = default;
};

Lit make_lit(bool eq, ITerm s, ITerm t) {
  if (eq && t < s) std::swap(s, t);
  return Lit{eq, std::move(s), std::move(t)};
}

using Conj = std::vector<Lit>;

void normalize_conj(Conj& c) {
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
}

// DNF of an atomized tope: list of conjunctions. Bot has no disjuncts.
std::vector<Conj> dnf(const ATope& a) {
  switch (a.tag) {
    case ATope::Tag::Top:
      return {{}};
    case ATope::Tag::Bot:
      return {};
    case ATope::Tag::Eq:
      return {{make_lit(true, a.s, a.t)}};
    case ATope::Tag::Leq:
      return {{make_lit(false, a.s, a.t)}};
    case ATope::Tag::Or: {
      auto l = dnf(*a.l), r = dnf(*a.r);
      l.insert(l.end(), r.begin(), r.end());
      return l;
    }
    case ATope::Tag::And: {
      auto l = dnf(*a.l), r = dnf(*a.r);
      std::vector<Conj> out;
      out.reserve(l.size() * r.size());
      for (const auto& x : l)
        for (const auto& y : r) {
          Conj c = x;
          c.insert(c.end(), y.begin(), y.end());
          normalize_conj(c);
          out.push_back(std::move(c));
        }
      return out;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Saturation

struct Builder {
  std::vector<ITerm> uni;  // sorted
  std::vector<int> parent;
  std::vector<std::vector<bool>> le;  // kept correct on representatives

  explicit Builder(std::vector<ITerm> universe) : uni(std::move(universe)) {
    size_t n = uni.size();
    parent.resize(n);
    for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
    le.assign(n, std::vector<bool>(n, false));
    int zero = idx(ITerm::zero());
    int one = idx(ITerm::one());
    for (size_t i = 0; i < n; ++i) {
      le[i][i] = true;
      le[static_cast<size_t>(zero)][i] = true;  // 0 <= x
      le[i][static_cast<size_t>(one)] = true;   // x <= 1
    }
  }

  int idx(const ITerm& t) const {
    auto it = std::lower_bound(uni.begin(), uni.end(), t);
    return static_cast<int>(it - uni.begin());
  }

  int find(int i) const {
    while (parent[i] != i) i = parent[i];
    return i;
  }

  void merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);  // keep the smaller index as representative
    parent[b] = a;
    size_t n = uni.size();
    for (size_t j = 0; j < n; ++j) {
      if (le[static_cast<size_t>(b)][j]) le[static_cast<size_t>(a)][j] = true;
      if (le[j][static_cast<size_t>(b)]) le[j][static_cast<size_t>(a)] = true;
    }
  }

  void add(const Lit& l) {
    int a = find(idx(l.s)), b = find(idx(l.t));
    if (l.eq)
      merge(a, b);
    else
      le[static_cast<size_t>(a)][static_cast<size_t>(b)] = true;
  }

  // Transitive closure + antisymmetry until fixpoint.
  void saturate() {
    size_t n = uni.size();
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t k = 0; k < n; ++k)
        for (size_t i = 0; i < n; ++i) {
          if (!le[i][k]) continue;
          for (size_t j = 0; j < n; ++j)
            if (le[k][j] && !le[i][j]) {
              le[i][j] = true;
              changed = true;
            }
        }
      for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
          if (le[i][j] && le[j][i] && find(static_cast<int>(i)) != find(static_cast<int>(j))) {
            merge(static_cast<int>(i), static_cast<int>(j));
            changed = true;
          }
    }
  }

  bool consistent() const {
    // The only source of inconsistency in the strict interval: 0 and 1 in
    // one class (everything else merely merges classes).
    Builder* self = const_cast<Builder*>(this);
    return self->find(self->idx(ITerm::zero())) != self->find(self->idx(ITerm::one()));
  }

  Branch freeze() const {
    Builder* self = const_cast<Builder*>(this);
    size_t n = uni.size();
    std::vector<int> root(n), rank(n);
    for (size_t i = 0; i < n; ++i) root[i] = self->find(static_cast<int>(i));
    for (size_t i = 0; i < n; ++i) {
      int below = 0;
      size_t ri = static_cast<size_t>(root[i]);
      for (size_t j = 0; j < n; ++j) {
        if (self->find(static_cast<int>(j)) != static_cast<int>(j)) continue;
        if (j == ri) continue;
        if (le[j][ri] && !le[ri][j]) ++below;
      }
      rank[i] = below;
    }
    return BranchFactory::make(uni, std::move(root), std::move(rank), consistent());
  }
};

// Pairs decided to be strictly ordered. Stored as terms, not indices, so
// the marks survive merges of other classes.
using StrictMarks = std::vector<std::pair<ITerm, ITerm>>;

bool strict_violated(const Builder& b, const StrictMarks& strict) {
  Builder* self = const_cast<Builder*>(&b);
  for (const auto& [s, t] : strict)
    if (self->find(self->idx(s)) == self->find(self->idx(t))) return true;
  return false;
}

// First pair of distinct representatives not yet decided by a strict mark,
// in index order; (-1, -1) when the branch is a weak total order.
std::pair<int, int> undecided(const Builder& b, const StrictMarks& strict) {
  Builder* self = const_cast<Builder*>(&b);
  size_t n = b.uni.size();
  for (size_t i = 0; i < n; ++i) {
    if (self->find(static_cast<int>(i)) != static_cast<int>(i)) continue;
    for (size_t j = i + 1; j < n; ++j) {
      if (self->find(static_cast<int>(j)) != static_cast<int>(j)) continue;
      bool marked = false;
      for (const auto& [s, t] : strict) {
        int a = self->find(self->idx(s));
        int c = self->find(self->idx(t));
        if ((a == static_cast<int>(i) && c == static_cast<int>(j)) ||
            (a == static_cast<int>(j) && c == static_cast<int>(i))) {
          marked = true;
          break;
        }
      }
      if (!marked) return {static_cast<int>(i), static_cast<int>(j)};
    }
  }
  return {-1, -1};
}

// Enumerates every weak total order refining the constraints: each pair of
// classes is decided, either merged or strictly ordered. Inconsistent
// states contribute nothing.
void split_total(Builder b, StrictMarks strict, std::vector<Branch>& out,
                 std::set<std::string>& seen) {
  b.saturate();
  if (!b.consistent()) return;
  if (strict_violated(b, strict)) return;
  auto [i, j] = undecided(b, strict);
  if (i < 0) {
    Branch br = b.freeze();
    if (seen.insert(br.signature()).second) out.push_back(std::move(br));
    return;
  }
  ITerm ti = b.uni[static_cast<size_t>(i)];
  ITerm tj = b.uni[static_cast<size_t>(j)];
  bool ij_known = b.le[static_cast<size_t>(i)][static_cast<size_t>(j)];
  bool ji_known = b.le[static_cast<size_t>(j)][static_cast<size_t>(i)];
  {
    Builder merged = b;
    merged.merge(i, j);
    split_total(std::move(merged), strict, out, seen);
  }
  if (!ji_known) {  // ti strictly below tj is still possible
    Builder left = b;
    left.le[static_cast<size_t>(i)][static_cast<size_t>(j)] = true;
    StrictMarks s2 = strict;
    s2.emplace_back(ti, tj);
    split_total(std::move(left), std::move(s2), out, seen);
  }
  if (!ij_known) {  // tj strictly below ti is still possible
    Builder right = std::move(b);
    right.le[static_cast<size_t>(j)][static_cast<size_t>(i)] = true;
    StrictMarks s2 = std::move(strict);
    s2.emplace_back(tj, ti);
    split_total(std::move(right), std::move(s2), out, seen);
  }
}

// The endpoints are distinct in every model.
StrictMarks initial_marks() { return {{ITerm::zero(), ITerm::one()}}; }

bool eval_in_branch(const ATope& a, const Branch& b) {
  switch (a.tag) {
    case ATope::Tag::Top:
      return true;
    case ATope::Tag::Bot:
      return false;
    case ATope::Tag::And:
      return eval_in_branch(*a.l, b) && eval_in_branch(*a.r, b);
    case ATope::Tag::Or:
      return eval_in_branch(*a.l, b) || eval_in_branch(*a.r, b);
    case ATope::Tag::Eq:
      return b.same_class(a.s, a.t);
    case ATope::Tag::Leq:
      return b.leq(a.s, a.t);
  }
  return false;
}

std::string lit_text(const Lit& l) {
  return iterm_text(l.s) + (l.eq ? "==" : "<=") + iterm_text(l.t);
}

std::string universe_text(const std::vector<ITerm>& uni) {
  std::string out;
  for (const auto& t : uni) {
    out += iterm_text(t);
    out += ',';
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Solver

namespace {

std::vector<ITerm> build_universe(std::vector<ITerm> atoms) {
  atoms.push_back(ITerm::zero());
  atoms.push_back(ITerm::one());
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  return atoms;
}

}  // namespace

bool Solver::entails(const TriContext& ctx, const std::vector<TopePtr>& extra,
                     const TopePtr& goal) {
  std::vector<TopePtr> hyps = ctx.hypotheses();
  hyps.insert(hyps.end(), extra.begin(), extra.end());

  ATopePtr agoal = atomize(ctx, goal);
  std::vector<ITerm> atoms;
  collect_atoms(*agoal, atoms);

  // Conjunction of all hypotheses.
  ATopePtr ahyps = anode(ATope::Tag::Top);
  for (const auto& h : hyps) ahyps = anode(ATope::Tag::And, ahyps, atomize(ctx, h));
  collect_atoms(*ahyps, atoms);

  std::vector<ITerm> uni = build_universe(std::move(atoms));
  std::string uni_key = universe_text(uni);

  for (Conj& disjunct : dnf(*ahyps)) {
    Key key{uni_key + "|"};
    for (const auto& l : disjunct) {
      key.text += lit_text(l);
      key.text += ';';
    }
    std::shared_ptr<const std::vector<Branch>> branches;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) branches = it->second;
    }
    if (!branches) {
      Builder b(uni);
      for (const auto& l : disjunct) b.add(l);
      auto computed = std::make_shared<std::vector<Branch>>();
      std::set<std::string> seen;
      split_total(std::move(b), initial_marks(), *computed, seen);
      branches = computed;
      std::lock_guard<std::mutex> lock(mu_);
      cache_.emplace(std::move(key), branches);
    }
    // An inconsistent disjunct has no branches and entails anything.
    for (const Branch& br : *branches)
      if (!eval_in_branch(*agoal, br)) return false;
  }
  return true;
}

bool Solver::entails(const TriContext& ctx, const TopePtr& goal) {
  return entails(ctx, {}, goal);
}

bool Solver::cube_equal(const TriContext& ctx, const CubeTermPtr& s, const CubeTermPtr& t) {
  CubeShapePtr a = cube_sort(ctx, s);
  CubeShapePtr b = cube_sort(ctx, t);
  if (!cube_shape_equal(*a, *b)) return false;
  return entails(ctx, {}, Tope::eq(s, t));
}

std::vector<Branch> Solver::saturate_branches(const TriContext& ctx,
                                              const std::vector<TopePtr>& hyps) {
  std::vector<TopePtr> all = ctx.hypotheses();
  all.insert(all.end(), hyps.begin(), hyps.end());

  std::vector<ITerm> atoms;
  for (const auto& a : ctx.interval_atoms()) atoms.push_back(ITerm::var(a.level, a.path));
  ATopePtr ahyps = anode(ATope::Tag::Top);
  for (const auto& h : all) ahyps = anode(ATope::Tag::And, ahyps, atomize(ctx, h));
  collect_atoms(*ahyps, atoms);
  std::vector<ITerm> uni = build_universe(std::move(atoms));

  std::vector<Branch> out;
  std::set<std::string> seen;
  for (Conj& disjunct : dnf(*ahyps)) {
    Builder b(uni);
    for (const auto& l : disjunct) b.add(l);
    split_total(std::move(b), initial_marks(), out, seen);
  }
  // Deterministic order.
  std::sort(out.begin(), out.end(), [](const Branch& a, const Branch& b) {
    return a.signature() < b.signature();
  });
  return out;
}

std::optional<std::string> Solver::countermodel(const TriContext& ctx,
                                                const std::vector<TopePtr>& hyps,
                                                const TopePtr& goal) {
  // Mirror of entails, but over the full context universe so every
  // variable of ctx gets a place in the rendered chain.
  std::vector<Branch> branches = saturate_branches(ctx, hyps);
  ATopePtr agoal = atomize(ctx, goal);
  // The goal may mention atoms outside the context universe only if the
  // caller passed terms not built from ctx binders; saturate_branches
  // already included every hypothesis atom and context leaf.
  for (const Branch& br : branches) {
    if (!br.consistent()) continue;
    if (!eval_in_branch(*agoal, br)) return render_branch(ctx, br);
  }
  return std::nullopt;
}

void Solver::clear_cache() {
  std::lock_guard<std::mutex> lock(mu_);
  cache_.clear();
}

size_t Solver::cache_size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.size();
}

Solver& Solver::global() {
  static Solver s;
  return s;
}

std::string render_branch(const TriContext& ctx, const Branch& b) {
  // Display names for universe atoms.
  auto display = [&](const ITerm& t) -> std::string {
    if (t.k == ITerm::K::Zero) return "0";
    if (t.k == ITerm::K::One) return "1";
    for (const auto& a : ctx.interval_atoms())
      if (a.level == t.level && a.path == t.path) return a.display;
    return iterm_text(t);
  };
  if (!b.consistent()) return "(inconsistent)";
  // Group classes by rank.
  int max_rank = 0;
  for (const auto& t : b.universe()) max_rank = std::max(max_rank, b.chain_rank(t));
  std::string out;
  for (int r = 0; r <= max_rank; ++r) {
    bool first_in_class = true;
    for (const auto& t : b.universe()) {
      if (b.chain_rank(t) != r) continue;
      if (first_in_class) {
        if (!out.empty()) out += " < ";
        first_in_class = false;
      } else {
        out += " === ";
      }
      out += display(t);
    }
  }
  return out;
}

}  // namespace stt
