#include "stt/syntax.hpp"

namespace stt {

// ---------------------------------------------------------------------------
// CubeShape

const CubeShapePtr& CubeShape::unit() {
  static const CubeShapePtr u = std::make_shared<const CubeShape>(Tag::Unit);
  return u;
}

const CubeShapePtr& CubeShape::interval() {
  static const CubeShapePtr i = std::make_shared<const CubeShape>(Tag::Interval);
  return i;
}

CubeShapePtr CubeShape::product(CubeShapePtr lhs, CubeShapePtr rhs) {
  auto p = std::make_shared<CubeShape>(Tag::Product);
  p->lhs = std::move(lhs);
  p->rhs = std::move(rhs);
  return p;
}

CubeShapePtr CubeShape::power(int n) {
  if (n <= 0) return unit();
  CubeShapePtr acc = interval();
  for (int i = 1; i < n; ++i) acc = product(interval(), acc);
  return acc;
}

bool cube_shape_equal(const CubeShape& a, const CubeShape& b) {
  if (a.tag != b.tag) return false;
  if (a.tag != CubeShape::Tag::Product) return true;
  return cube_shape_equal(*a.lhs, *b.lhs) && cube_shape_equal(*a.rhs, *b.rhs);
}

static void collect_paths(const CubeShape& c, Path& prefix, std::vector<Path>& out) {
  switch (c.tag) {
    case CubeShape::Tag::Unit:
      return;
    case CubeShape::Tag::Interval:
      out.push_back(prefix);
      return;
    case CubeShape::Tag::Product:
      prefix.push_back(1);
      collect_paths(*c.lhs, prefix, out);
      prefix.back() = 2;
      collect_paths(*c.rhs, prefix, out);
      prefix.pop_back();
      return;
  }
}

std::vector<Path> interval_paths(const CubeShape& c) {
  std::vector<Path> out;
  Path prefix;
  collect_paths(c, prefix, out);
  return out;
}

const CubeShape* subshape_at(const CubeShape& c, const Path& p) {
  const CubeShape* cur = &c;
  for (uint8_t step : p) {
    if (cur->tag != CubeShape::Tag::Product) return nullptr;
    cur = (step == 1 ? cur->lhs.get() : cur->rhs.get());
  }
  return cur;
}

CubeTermPtr leaf_term(const CubeShape& shape, int leaf, int var_index) {
  std::vector<Path> paths = interval_paths(shape);
  if (leaf < 0 || leaf >= static_cast<int>(paths.size()))
    fail(DiagCode::OutOfRange, "cube has no interval leaf " + std::to_string(leaf));
  CubeTermPtr t = CubeTerm::var(var_index);
  for (uint8_t step : paths[static_cast<size_t>(leaf)]) t = CubeTerm::proj(step, t);
  return t;
}

// ---------------------------------------------------------------------------
// CubeTerm

CubeTermPtr CubeTerm::var(int index) {
  auto v = std::make_shared<CubeTerm>(Tag::Var);
  v->index = index;
  return v;
}

const CubeTermPtr& CubeTerm::star() {
  static const CubeTermPtr s = std::make_shared<const CubeTerm>(Tag::Star);
  return s;
}

const CubeTermPtr& CubeTerm::zero() {
  static const CubeTermPtr z = std::make_shared<const CubeTerm>(Tag::Zero);
  return z;
}

const CubeTermPtr& CubeTerm::one() {
  static const CubeTermPtr o = std::make_shared<const CubeTerm>(Tag::One);
  return o;
}

CubeTermPtr CubeTerm::pair(CubeTermPtr fst, CubeTermPtr snd) {
  auto p = std::make_shared<CubeTerm>(Tag::Pair);
  p->a = std::move(fst);
  p->b = std::move(snd);
  return p;
}

CubeTermPtr CubeTerm::proj(uint8_t which, CubeTermPtr of) {
  auto p = std::make_shared<CubeTerm>(Tag::Proj);
  p->which = which;
  p->a = std::move(of);
  return p;
}

bool cube_term_equal(const CubeTerm& a, const CubeTerm& b) {
  if (a.tag != b.tag) return false;
  switch (a.tag) {
    case CubeTerm::Tag::Var:
      return a.index == b.index;
    case CubeTerm::Tag::Star:
    case CubeTerm::Tag::Zero:
    case CubeTerm::Tag::One:
      return true;
    case CubeTerm::Tag::Pair:
      return cube_term_equal(*a.a, *b.a) && cube_term_equal(*a.b, *b.b);
    case CubeTerm::Tag::Proj:
      return a.which == b.which && cube_term_equal(*a.a, *b.a);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Tope

const TopePtr& Tope::top() {
  static const TopePtr t = std::make_shared<const Tope>(Tag::Top);
  return t;
}

const TopePtr& Tope::bot() {
  static const TopePtr b = std::make_shared<const Tope>(Tag::Bot);
  return b;
}

TopePtr Tope::conj(TopePtr l, TopePtr r) {
  auto t = std::make_shared<Tope>(Tag::And);
  t->l = std::move(l);
  t->r = std::move(r);
  return t;
}

TopePtr Tope::disj(TopePtr l, TopePtr r) {
  auto t = std::make_shared<Tope>(Tag::Or);
  t->l = std::move(l);
  t->r = std::move(r);
  return t;
}

TopePtr Tope::eq(CubeTermPtr s, CubeTermPtr t) {
  auto e = std::make_shared<Tope>(Tag::Eq);
  e->s = std::move(s);
  e->t = std::move(t);
  return e;
}

TopePtr Tope::leq(CubeTermPtr s, CubeTermPtr t) {
  auto e = std::make_shared<Tope>(Tag::Leq);
  e->s = std::move(s);
  e->t = std::move(t);
  return e;
}

bool tope_equal(const Tope& a, const Tope& b) {
  if (a.tag != b.tag) return false;
  switch (a.tag) {
    case Tope::Tag::Top:
    case Tope::Tag::Bot:
      return true;
    case Tope::Tag::And:
    case Tope::Tag::Or:
      return tope_equal(*a.l, *b.l) && tope_equal(*a.r, *b.r);
    case Tope::Tag::Eq:
    case Tope::Tag::Leq:
      return cube_term_equal(*a.s, *b.s) && cube_term_equal(*a.t, *b.t);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Expr builders

namespace mk {

static std::shared_ptr<Expr> node(Expr::Tag t) { return std::make_shared<Expr>(t); }

ExprPtr var(int index) {
  auto e = node(Expr::Tag::Var);
  e->var_index = index;
  return e;
}

ExprPtr universe() { return node(Expr::Tag::Universe); }

ExprPtr pi(std::string binder, ExprPtr domain, ExprPtr codomain) {
  auto e = node(Expr::Tag::Pi);
  e->binder = std::move(binder);
  e->e1 = std::move(domain);
  e->e2 = std::move(codomain);
  return e;
}

ExprPtr sigma(std::string binder, ExprPtr domain, ExprPtr codomain) {
  auto e = node(Expr::Tag::Sigma);
  e->binder = std::move(binder);
  e->e1 = std::move(domain);
  e->e2 = std::move(codomain);
  return e;
}

ExprPtr id(ExprPtr type, ExprPtr lhs, ExprPtr rhs) {
  auto e = node(Expr::Tag::Id);
  e->e1 = std::move(type);
  e->e2 = std::move(lhs);
  e->e3 = std::move(rhs);
  return e;
}

ExprPtr lam(std::string binder, ExprPtr body) {
  auto e = node(Expr::Tag::Lam);
  e->binder = std::move(binder);
  e->e1 = std::move(body);
  return e;
}

ExprPtr lam(std::string binder, std::vector<std::string> leaves, ExprPtr body) {
  auto e = node(Expr::Tag::Lam);
  e->binder = std::move(binder);
  e->leaves = std::move(leaves);
  e->e1 = std::move(body);
  return e;
}

ExprPtr app(ExprPtr fn, ExprPtr arg) {
  auto e = node(Expr::Tag::App);
  e->e1 = std::move(fn);
  e->e2 = std::move(arg);
  return e;
}

ExprPtr pair(ExprPtr fst, ExprPtr snd) {
  auto e = node(Expr::Tag::Pair);
  e->e1 = std::move(fst);
  e->e2 = std::move(snd);
  return e;
}

ExprPtr fst(ExprPtr p) {
  auto e = node(Expr::Tag::Fst);
  e->e1 = std::move(p);
  return e;
}

ExprPtr snd(ExprPtr p) {
  auto e = node(Expr::Tag::Snd);
  e->e1 = std::move(p);
  return e;
}

ExprPtr refl() { return node(Expr::Tag::Refl); }
ExprPtr jelim() { return node(Expr::Tag::J); }

ExprPtr ext(std::string binder, std::vector<std::string> leaves, CubeShapePtr cube,
            TopePtr domain_tope, TopePtr boundary_tope, ExprPtr family, ExprPtr boundary) {
  auto e = node(Expr::Tag::Ext);
  e->binder = std::move(binder);
  e->leaves = std::move(leaves);
  e->cube = std::move(cube);
  e->tope1 = std::move(domain_tope);
  e->tope2 = std::move(boundary_tope);
  e->e1 = std::move(family);
  e->e2 = std::move(boundary);
  return e;
}

ExprPtr ext_app(ExprPtr fn, CubeTermPtr arg) {
  auto e = node(Expr::Tag::ExtApp);
  e->e1 = std::move(fn);
  e->cterm = std::move(arg);
  return e;
}

ExprPtr rec_bot() { return node(Expr::Tag::RecBot); }

ExprPtr rec_or(TopePtr left_guard, TopePtr right_guard, ExprPtr left, ExprPtr right) {
  auto e = node(Expr::Tag::RecOr);
  e->tope1 = std::move(left_guard);
  e->tope2 = std::move(right_guard);
  e->e1 = std::move(left);
  e->e2 = std::move(right);
  return e;
}

ExprPtr cnst(std::string name) {
  auto e = node(Expr::Tag::Const);
  e->cname = std::move(name);
  return e;
}

ExprPtr cube_term(CubeTermPtr t) {
  auto e = node(Expr::Tag::CubeE);
  e->cterm = std::move(t);
  return e;
}

ExprPtr with_span(ExprPtr e, Span s) {
  auto copy = std::make_shared<Expr>(*e);
  copy->span = s;
  return copy;
}

}  // namespace mk

// ---------------------------------------------------------------------------
// alpha_equal

bool alpha_equal(const Expr& a, const Expr& b) {
  if (a.tag != b.tag) return false;
  auto eq = [](const ExprPtr& x, const ExprPtr& y) {
    if (!x || !y) return !x && !y;
    return alpha_equal(*x, *y);
  };
  switch (a.tag) {
    case Expr::Tag::Var:
      return a.var_index == b.var_index;
    case Expr::Tag::Universe:
    case Expr::Tag::Refl:
    case Expr::Tag::J:
    case Expr::Tag::RecBot:
      return true;
    case Expr::Tag::Pi:
    case Expr::Tag::Sigma:
    case Expr::Tag::App:
    case Expr::Tag::Pair:
      return eq(a.e1, b.e1) && eq(a.e2, b.e2);
    case Expr::Tag::Id:
      return eq(a.e1, b.e1) && eq(a.e2, b.e2) && eq(a.e3, b.e3);
    case Expr::Tag::Lam:
    case Expr::Tag::Fst:
    case Expr::Tag::Snd:
      return eq(a.e1, b.e1);
    case Expr::Tag::Ext:
      return cube_shape_equal(*a.cube, *b.cube) && tope_equal(*a.tope1, *b.tope1) &&
             tope_equal(*a.tope2, *b.tope2) && eq(a.e1, b.e1) && eq(a.e2, b.e2);
    case Expr::Tag::ExtApp:
      return eq(a.e1, b.e1) && cube_term_equal(*a.cterm, *b.cterm);
    case Expr::Tag::RecOr:
      return tope_equal(*a.tope1, *b.tope1) && tope_equal(*a.tope2, *b.tope2) &&
             eq(a.e1, b.e1) && eq(a.e2, b.e2);
    case Expr::Tag::Const:
      return a.cname == b.cname;
    case Expr::Tag::CubeE:
      return cube_term_equal(*a.cterm, *b.cterm);
  }
  return false;
}

// ---------------------------------------------------------------------------
// TriContext

TriContext TriContext::extended_cube(std::string name, CubeShapePtr shape,
                                     std::vector<std::string> leaf_names) const {
  TriContext out = *this;
  CubeBinder cb;
  cb.name = std::move(name);
  cb.shape = std::move(shape);
  if (leaf_names.empty()) {
    size_t n = interval_paths(*cb.shape).size();
    for (size_t i = 0; i < n; ++i)
      leaf_names.push_back(n == 1 ? cb.name : cb.name + "." + std::to_string(i + 1));
  }
  cb.leaf_names = std::move(leaf_names);
  out.binder_entries_.push_back(static_cast<int>(out.entries_.size()));
  out.entries_.push_back(std::move(cb));
  return out;
}

TriContext TriContext::extended_tope(TopePtr tope) const {
  TriContext out = *this;
  TopeHyp h;
  h.tope = std::move(tope);
  h.binders_before = binder_depth();
  out.entries_.push_back(std::move(h));
  return out;
}

TriContext TriContext::extended_type(std::string name, ExprPtr type) const {
  TriContext out = *this;
  TypeBinder tb;
  tb.name = std::move(name);
  tb.type = std::move(type);
  out.binder_entries_.push_back(static_cast<int>(out.entries_.size()));
  out.entries_.push_back(std::move(tb));
  return out;
}

const TriContext::Entry& TriContext::binder(int index) const {
  int depth = binder_depth();
  if (index < 0 || index >= depth)
    fail(DiagCode::UnboundVariable, "variable index " + std::to_string(index) +
                                        " out of range (context has " +
                                        std::to_string(depth) + " binders)");
  return entries_[binder_entries_[depth - 1 - index]];
}

int TriContext::binders_before(int index) const {
  return binder_depth() - 1 - index;
}

std::vector<TopePtr> TriContext::hypotheses() const {
  std::vector<TopePtr> out;
  int depth = binder_depth();
  for (const auto& e : entries_) {
    if (const auto* h = std::get_if<TopeHyp>(&e))
      out.push_back(shift(h->tope, depth - h->binders_before));
  }
  return out;
}

std::vector<TriContext::LeafAtom> TriContext::interval_atoms() const {
  std::vector<LeafAtom> out;
  int level = 0;
  for (const auto& e : entries_) {
    if (const auto* cb = std::get_if<CubeBinder>(&e)) {
      auto paths = interval_paths(*cb->shape);
      for (size_t i = 0; i < paths.size(); ++i) {
        LeafAtom a;
        a.level = level;
        a.path = paths[i];
        a.display = i < cb->leaf_names.size() ? cb->leaf_names[i]
                                              : cb->name + "." + std::to_string(i + 1);
        out.push_back(std::move(a));
      }
    }
    if (!std::holds_alternative<TopeHyp>(e)) ++level;
  }
  return out;
}

std::string TriContext::display_name(int index) const {
  const Entry& e = binder(index);
  if (const auto* cb = std::get_if<CubeBinder>(&e)) {
    if (!cb->name.empty()) return cb->name;
  } else if (const auto* tb = std::get_if<TypeBinder>(&e)) {
    if (!tb->name.empty()) return tb->name;
  }
  return "_x" + std::to_string(binders_before(index));
}

// ---------------------------------------------------------------------------
// shift

CubeTermPtr shift(const CubeTermPtr& t, int by, int cutoff) {
  if (by == 0) return t;
  switch (t->tag) {
    case CubeTerm::Tag::Var:
      if (t->index < cutoff) return t;
      return CubeTerm::var(t->index + by);
    case CubeTerm::Tag::Star:
    case CubeTerm::Tag::Zero:
    case CubeTerm::Tag::One:
      return t;
    case CubeTerm::Tag::Pair:
      return CubeTerm::pair(shift(t->a, by, cutoff), shift(t->b, by, cutoff));
    case CubeTerm::Tag::Proj:
      return CubeTerm::proj(t->which, shift(t->a, by, cutoff));
  }
  return t;
}

TopePtr shift(const TopePtr& t, int by, int cutoff) {
  if (by == 0) return t;
  switch (t->tag) {
    case Tope::Tag::Top:
    case Tope::Tag::Bot:
      return t;
    case Tope::Tag::And:
      return Tope::conj(shift(t->l, by, cutoff), shift(t->r, by, cutoff));
    case Tope::Tag::Or:
      return Tope::disj(shift(t->l, by, cutoff), shift(t->r, by, cutoff));
    case Tope::Tag::Eq:
      return Tope::eq(shift(t->s, by, cutoff), shift(t->t, by, cutoff));
    case Tope::Tag::Leq:
      return Tope::leq(shift(t->s, by, cutoff), shift(t->t, by, cutoff));
  }
  return t;
}

ExprPtr shift(const ExprPtr& e, int by, int cutoff) {
  if (by == 0) return e;
  auto copy = std::make_shared<Expr>(*e);
  switch (e->tag) {
    case Expr::Tag::Var:
      if (e->var_index < cutoff) return e;
      copy->var_index = e->var_index + by;
      return copy;
    case Expr::Tag::Universe:
    case Expr::Tag::Refl:
    case Expr::Tag::J:
    case Expr::Tag::RecBot:
    case Expr::Tag::Const:
      return e;
    case Expr::Tag::Pi:
    case Expr::Tag::Sigma:
      copy->e1 = shift(e->e1, by, cutoff);
      copy->e2 = shift(e->e2, by, cutoff + 1);
      return copy;
    case Expr::Tag::Id:
      copy->e1 = shift(e->e1, by, cutoff);
      copy->e2 = shift(e->e2, by, cutoff);
      copy->e3 = shift(e->e3, by, cutoff);
      return copy;
    case Expr::Tag::Lam:
      copy->e1 = shift(e->e1, by, cutoff + 1);
      return copy;
    case Expr::Tag::App:
    case Expr::Tag::Pair:
      copy->e1 = shift(e->e1, by, cutoff);
      copy->e2 = shift(e->e2, by, cutoff);
      return copy;
    case Expr::Tag::Fst:
    case Expr::Tag::Snd:
      copy->e1 = shift(e->e1, by, cutoff);
      return copy;
    case Expr::Tag::Ext:
      copy->tope1 = shift(e->tope1, by, cutoff + 1);
      copy->tope2 = shift(e->tope2, by, cutoff + 1);
      copy->e1 = shift(e->e1, by, cutoff + 1);
      copy->e2 = shift(e->e2, by, cutoff + 1);
      return copy;
    case Expr::Tag::ExtApp:
      copy->e1 = shift(e->e1, by, cutoff);
      copy->cterm = shift(e->cterm, by, cutoff);
      return copy;
    case Expr::Tag::RecOr:
      copy->tope1 = shift(e->tope1, by, cutoff);
      copy->tope2 = shift(e->tope2, by, cutoff);
      copy->e1 = shift(e->e1, by, cutoff);
      copy->e2 = shift(e->e2, by, cutoff);
      return copy;
    case Expr::Tag::CubeE:
      copy->cterm = shift(e->cterm, by, cutoff);
      return copy;
  }
  return e;
}

// ---------------------------------------------------------------------------
// substitute

namespace {

SubstArg shift_arg(const SubstArg& v, int by) {
  if (const auto* e = std::get_if<ExprPtr>(&v)) return SubstArg(shift(*e, by));
  return SubstArg(shift(std::get<CubeTermPtr>(v), by));
}

CubeTermPtr cube_value(const SubstArg& v) {
  if (const auto* c = std::get_if<CubeTermPtr>(&v)) return *c;
  const ExprPtr& e = std::get<ExprPtr>(v);
  if (e->tag == Expr::Tag::CubeE) return e->cterm;
  fail(DiagCode::SortMismatch,
       "substituting a term of the type layer for a cube variable");
}

}  // namespace

CubeTermPtr substitute(const CubeTermPtr& target, int index, const SubstArg& value) {
  switch (target->tag) {
    case CubeTerm::Tag::Var:
      if (target->index == index) return cube_value(value);
      if (target->index > index) return CubeTerm::var(target->index - 1);
      return target;
    case CubeTerm::Tag::Star:
    case CubeTerm::Tag::Zero:
    case CubeTerm::Tag::One:
      return target;
    case CubeTerm::Tag::Pair:
      return CubeTerm::pair(substitute(target->a, index, value),
                            substitute(target->b, index, value));
    case CubeTerm::Tag::Proj:
      return CubeTerm::proj(target->which, substitute(target->a, index, value));
  }
  return target;
}

TopePtr substitute(const TopePtr& target, int index, const SubstArg& value) {
  switch (target->tag) {
    case Tope::Tag::Top:
    case Tope::Tag::Bot:
      return target;
    case Tope::Tag::And:
      return Tope::conj(substitute(target->l, index, value),
                        substitute(target->r, index, value));
    case Tope::Tag::Or:
      return Tope::disj(substitute(target->l, index, value),
                        substitute(target->r, index, value));
    case Tope::Tag::Eq:
      return Tope::eq(substitute(target->s, index, value),
                      substitute(target->t, index, value));
    case Tope::Tag::Leq:
      return Tope::leq(substitute(target->s, index, value),
                       substitute(target->t, index, value));
  }
  return target;
}

ExprPtr substitute(const ExprPtr& target, int index, const SubstArg& value) {
  auto copy = std::make_shared<Expr>(*target);
  switch (target->tag) {
    case Expr::Tag::Var:
      if (target->var_index == index) {
        if (const auto* e = std::get_if<ExprPtr>(&value)) return *e;
        return mk::cube_term(std::get<CubeTermPtr>(value));
      }
      if (target->var_index > index) {
        copy->var_index = target->var_index - 1;
        return copy;
      }
      return target;
    case Expr::Tag::Universe:
    case Expr::Tag::Refl:
    case Expr::Tag::J:
    case Expr::Tag::RecBot:
    case Expr::Tag::Const:
      return target;
    case Expr::Tag::Pi:
    case Expr::Tag::Sigma: {
      copy->e1 = substitute(target->e1, index, value);
      copy->e2 = substitute(target->e2, index + 1, shift_arg(value, 1));
      return copy;
    }
    case Expr::Tag::Id:
      copy->e1 = substitute(target->e1, index, value);
      copy->e2 = substitute(target->e2, index, value);
      copy->e3 = substitute(target->e3, index, value);
      return copy;
    case Expr::Tag::Lam:
      copy->e1 = substitute(target->e1, index + 1, shift_arg(value, 1));
      return copy;
    case Expr::Tag::App:
    case Expr::Tag::Pair:
      copy->e1 = substitute(target->e1, index, value);
      copy->e2 = substitute(target->e2, index, value);
      return copy;
    case Expr::Tag::Fst:
    case Expr::Tag::Snd:
      copy->e1 = substitute(target->e1, index, value);
      return copy;
    case Expr::Tag::Ext: {
      SubstArg v1 = shift_arg(value, 1);
      copy->tope1 = substitute(target->tope1, index + 1, v1);
      copy->tope2 = substitute(target->tope2, index + 1, v1);
      copy->e1 = substitute(target->e1, index + 1, v1);
      copy->e2 = substitute(target->e2, index + 1, v1);
      return copy;
    }
    case Expr::Tag::ExtApp:
      copy->e1 = substitute(target->e1, index, value);
      copy->cterm = substitute(target->cterm, index, value);
      return copy;
    case Expr::Tag::RecOr:
      copy->tope1 = substitute(target->tope1, index, value);
      copy->tope2 = substitute(target->tope2, index, value);
      copy->e1 = substitute(target->e1, index, value);
      copy->e2 = substitute(target->e2, index, value);
      return copy;
    case Expr::Tag::CubeE:
      copy->cterm = substitute(target->cterm, index, value);
      return copy;
  }
  return target;
}

ExprPtr open_binder(const ExprPtr& body, const SubstArg& value) {
  return substitute(body, 0, value);
}

TopePtr open_binder(const TopePtr& body, const CubeTermPtr& value) {
  return substitute(body, 0, SubstArg(value));
}

// ---------------------------------------------------------------------------
// Cube sorting and normalization

CubeShapePtr cube_sort(const TriContext& ctx, const CubeTermPtr& t) {
  switch (t->tag) {
    case CubeTerm::Tag::Var: {
      const auto& entry = ctx.binder(t->index);
      const auto* cb = std::get_if<TriContext::CubeBinder>(&entry);
      if (!cb)
        fail(DiagCode::IllFormedCubeTerm,
             "cube term references a type-layer binder");
      return cb->shape;
    }
    case CubeTerm::Tag::Star:
      return CubeShape::unit();
    case CubeTerm::Tag::Zero:
    case CubeTerm::Tag::One:
      return CubeShape::interval();
    case CubeTerm::Tag::Pair:
      return CubeShape::product(cube_sort(ctx, t->a), cube_sort(ctx, t->b));
    case CubeTerm::Tag::Proj: {
      CubeShapePtr of = cube_sort(ctx, t->a);
      if (of->tag != CubeShape::Tag::Product)
        fail(DiagCode::IllFormedCubeTerm, "projection from a non-product cube");
      return t->which == 1 ? of->lhs : of->rhs;
    }
  }
  fail(DiagCode::IllFormedCubeTerm, "malformed cube term");
}

namespace {

// Reduces projection spines until the head is Var/Zero/One/Star/Pair.
CubeTermPtr whnf_cube(const CubeTermPtr& t) {
  if (t->tag != CubeTerm::Tag::Proj) return t;
  CubeTermPtr of = whnf_cube(t->a);
  if (of->tag == CubeTerm::Tag::Pair)
    return whnf_cube(t->which == 1 ? of->a : of->b);
  if (of == t->a) return t;
  return CubeTerm::proj(t->which, of);
}

CubeTermPtr eta_expand(const CubeTermPtr& t, const CubeShape& sort) {
  switch (sort.tag) {
    case CubeShape::Tag::Unit:
      return CubeTerm::star();
    case CubeShape::Tag::Product: {
      CubeTermPtr w = whnf_cube(t);
      CubeTermPtr l = w->tag == CubeTerm::Tag::Pair ? w->a : CubeTerm::proj(1, w);
      CubeTermPtr r = w->tag == CubeTerm::Tag::Pair ? w->b : CubeTerm::proj(2, w);
      return CubeTerm::pair(eta_expand(l, *sort.lhs), eta_expand(r, *sort.rhs));
    }
    case CubeShape::Tag::Interval:
      return whnf_cube(t);
  }
  return t;
}

}  // namespace

CubeTermPtr normalize_cube(const TriContext& ctx, const CubeTermPtr& t) {
  CubeShapePtr sort = cube_sort(ctx, t);
  return eta_expand(t, *sort);
}

bool cube_normal(const TriContext& ctx, const CubeTermPtr& t) {
  return cube_term_equal(*t, *normalize_cube(ctx, t));
}

void check_tope(const TriContext& ctx, const TopePtr& t) {
  switch (t->tag) {
    case Tope::Tag::Top:
    case Tope::Tag::Bot:
      return;
    case Tope::Tag::And:
    case Tope::Tag::Or:
      check_tope(ctx, t->l);
      check_tope(ctx, t->r);
      return;
    case Tope::Tag::Eq: {
      CubeShapePtr a = cube_sort(ctx, t->s);
      CubeShapePtr b = cube_sort(ctx, t->t);
      if (!cube_shape_equal(*a, *b))
        fail(DiagCode::IllFormedTope, "equality tope relates terms of different cubes");
      return;
    }
    case Tope::Tag::Leq: {
      CubeShapePtr a = cube_sort(ctx, t->s);
      CubeShapePtr b = cube_sort(ctx, t->t);
      if (a->tag != CubeShape::Tag::Interval || b->tag != CubeShape::Tag::Interval)
        fail(DiagCode::IllFormedTope, "inequality tope requires interval terms");
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// rendering

std::string render_cube_term(const TriContext& ctx, const CubeTermPtr& t) {
  switch (t->tag) {
    case CubeTerm::Tag::Star:
      return "*";
    case CubeTerm::Tag::Zero:
      return "0";
    case CubeTerm::Tag::One:
      return "1";
    case CubeTerm::Tag::Pair:
      return "(" + render_cube_term(ctx, t->a) + ", " + render_cube_term(ctx, t->b) + ")";
    case CubeTerm::Tag::Var:
      return ctx.display_name(t->index);
    case CubeTerm::Tag::Proj: {
      Path path;
      const CubeTerm* cur = t.get();
      while (cur->tag == CubeTerm::Tag::Proj) {
        path.push_back(cur->which);
        cur = cur->a.get();
      }
      std::reverse(path.begin(), path.end());
      if (cur->tag == CubeTerm::Tag::Var && t->a) {
        if (const auto* cb = std::get_if<TriContext::CubeBinder>(&ctx.binder(cur->index))) {
          auto paths = interval_paths(*cb->shape);
          for (size_t i = 0; i < paths.size(); ++i)
            if (paths[i] == path && i < cb->leaf_names.size()) return cb->leaf_names[i];
        }
      }
      std::string base = cur->tag == CubeTerm::Tag::Var ? ctx.display_name(cur->index)
                                                        : render_cube_term(ctx, t->a);
      if (cur->tag != CubeTerm::Tag::Var)
        return base + "." + std::to_string(t->which);
      for (uint8_t step : path) base += "." + std::to_string(step);
      return base;
    }
  }
  return "?";
}

namespace {

// Precedence: 0 = disjunction, 1 = conjunction, 2 = atom.
std::string render_tope_at(const TriContext& ctx, const TopePtr& t, int min_prec) {
  auto wrap = [&](int prec, std::string s) {
    return prec < min_prec ? "(" + std::move(s) + ")" : s;
  };
  switch (t->tag) {
    case Tope::Tag::Top:
      return "TOP";
    case Tope::Tag::Bot:
      return "BOT";
    case Tope::Tag::Or:
      return wrap(0, render_tope_at(ctx, t->l, 0) + " \\/ " + render_tope_at(ctx, t->r, 0));
    case Tope::Tag::And:
      return wrap(1, render_tope_at(ctx, t->l, 1) + " /\\ " + render_tope_at(ctx, t->r, 1));
    case Tope::Tag::Eq:
      return render_cube_term(ctx, t->s) + " === " + render_cube_term(ctx, t->t);
    case Tope::Tag::Leq:
      return render_cube_term(ctx, t->s) + " <= " + render_cube_term(ctx, t->t);
  }
  return "?";
}

}  // namespace

std::string render_tope(const TriContext& ctx, const TopePtr& t) {
  return render_tope_at(ctx, t, 0);
}

std::string render_entailment(const TriContext& ctx, const std::vector<TopePtr>& hyps,
                              const TopePtr& goal) {
  std::string out;
  for (size_t i = 0; i < hyps.size(); ++i) {
    if (i) out += ", ";
    out += render_tope(ctx, hyps[i]);
  }
  out += out.empty() ? "|- " : " |- ";
  out += render_tope(ctx, goal);
  return out;
}

}  // namespace stt
