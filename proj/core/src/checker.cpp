#include "stt/checker.hpp"

#include <utility>

namespace stt {

namespace {

// Head-form description for error messages.
std::string describe(const ExprPtr& e) {
  switch (e->tag) {
    case Expr::Tag::Universe: return "U";
    case Expr::Tag::Pi: return "a function type";
    case Expr::Tag::Sigma: return "a pair type";
    case Expr::Tag::Id: return "an identity type";
    case Expr::Tag::Ext: return "an extension type";
    case Expr::Tag::Lam: return "a function literal";
    case Expr::Tag::Pair: return "a pair";
    case Expr::Tag::Refl: return "refl";
    case Expr::Tag::J: return "the identity eliminator";
    case Expr::Tag::RecBot: return "recBOT";
    case Expr::Tag::RecOr: return "a recOR form";
    case Expr::Tag::Const: return "'" + e->cname + "'";
    case Expr::Tag::Var: return "a variable";
    case Expr::Tag::App:
    case Expr::Tag::ExtApp: return "an application";
    case Expr::Tag::Fst: return "a first projection";
    case Expr::Tag::Snd: return "a second projection";
    case Expr::Tag::CubeE: return "a cube term";
  }
  return "an expression";
}

// Cube term denoted by `e`, or nullptr when `e` is not cube-sorted.
CubeTermPtr try_cube(const TriContext& ctx, const ExprPtr& e) {
  switch (e->tag) {
    case Expr::Tag::CubeE:
      return e->cterm;
    case Expr::Tag::Var: {
      if (e->var_index < 0 || e->var_index >= ctx.binder_depth()) return nullptr;
      if (std::holds_alternative<TriContext::CubeBinder>(ctx.binder(e->var_index)))
        return CubeTerm::var(e->var_index);
      return nullptr;
    }
    case Expr::Tag::Pair: {
      CubeTermPtr a = try_cube(ctx, e->e1);
      CubeTermPtr b = a ? try_cube(ctx, e->e2) : nullptr;
      return b ? CubeTerm::pair(a, b) : nullptr;
    }
    case Expr::Tag::Fst: {
      CubeTermPtr a = try_cube(ctx, e->e1);
      return a ? CubeTerm::proj(1, a) : nullptr;
    }
    case Expr::Tag::Snd: {
      CubeTermPtr a = try_cube(ctx, e->e1);
      return a ? CubeTerm::proj(2, a) : nullptr;
    }
    default:
      return nullptr;
  }
}

// Top-level disjuncts of a tope, left to right.
void or_list(const TopePtr& t, std::vector<TopePtr>& out) {
  if (t->tag == Tope::Tag::Or) {
    or_list(t->l, out);
    or_list(t->r, out);
  } else {
    out.push_back(t);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Environment

const Declaration* Environment::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &decls_[it->second];
}

void Environment::declare(Declaration d) {
  if (index_.count(d.name))
    fail(DiagCode::DuplicateName, "'" + d.name + "' is already declared", d.span);
  index_[d.name] = decls_.size();
  decls_.push_back(std::move(d));
}

// ---------------------------------------------------------------------------
// Weak-head normalization

ExprPtr Checker::whnf(const TriContext& ctx, const ExprPtr& e0) {
  ExprPtr e = e0;
  for (;;) {
    switch (e->tag) {
      case Expr::Tag::Const: {
        const Declaration* d = env_.find(e->cname);
        if (!d) fail(DiagCode::UnboundVariable, "unknown name " + describe(e), e->span);
        if (d->kind == Declaration::Kind::Definition) {
          e = d->body;
          continue;
        }
        if (d->kind == Declaration::Kind::ShapeAlias)
          fail(DiagCode::NotATerm, "shape " + describe(e) + " used as a term", e->span);
        return e;
      }
      case Expr::Tag::App: {
        ExprPtr f = whnf(ctx, e->e1);
        if (f->tag == Expr::Tag::Lam) {
          CubeTermPtr ct = try_cube(ctx, e->e2);
          e = ct ? open_binder(f->e1, SubstArg(ct)) : open_binder(f->e1, SubstArg(e->e2));
          continue;
        }
        // J reduces when the path argument is refl.
        std::vector<ExprPtr> spine{e->e2};
        ExprPtr head = f;
        while (head->tag == Expr::Tag::App) {
          spine.push_back(head->e2);
          head = head->e1;
        }
        if (head->tag == Expr::Tag::J && spine.size() >= 6) {
          std::reverse(spine.begin(), spine.end());
          if (whnf(ctx, spine[5])->tag == Expr::Tag::Refl) {
            ExprPtr r = spine[3];
            for (size_t i = 6; i < spine.size(); ++i) r = mk::app(r, spine[i]);
            e = r;
            continue;
          }
        }
        // Applications at cube points are extension applications.
        if (CubeTermPtr ct = try_cube(ctx, e->e2)) {
          e = mk::ext_app(f, ct);
          continue;
        }
        return f == e->e1 ? e : mk::with_span(mk::app(f, e->e2), e->span);
      }
      case Expr::Tag::ExtApp: {
        ExprPtr f = whnf(ctx, e->e1);
        if (f->tag == Expr::Tag::Lam) {
          e = open_binder(f->e1, SubstArg(e->cterm));
          continue;
        }
        // Boundary collapse: f(s) is the prescribed section once the
        // boundary tope holds at s.
        if (ExprPtr nt = neutral_type(ctx, f)) {
          ExprPtr ntw = whnf(ctx, nt);
          if (ntw->tag == Expr::Tag::Ext &&
              holds(ctx, open_binder(ntw->tope2, e->cterm))) {
            e = open_binder(ntw->e2, SubstArg(e->cterm));
            continue;
          }
        }
        return f == e->e1 ? e : mk::with_span(mk::ext_app(f, e->cterm), e->span);
      }
      case Expr::Tag::Fst: {
        ExprPtr p = whnf(ctx, e->e1);
        if (p->tag == Expr::Tag::Pair) {
          e = p->e1;
          continue;
        }
        return p == e->e1 ? e : mk::fst(p);
      }
      case Expr::Tag::Snd: {
        ExprPtr p = whnf(ctx, e->e1);
        if (p->tag == Expr::Tag::Pair) {
          e = p->e2;
          continue;
        }
        return p == e->e1 ? e : mk::snd(p);
      }
      case Expr::Tag::RecOr: {
        if (holds(ctx, e->tope1)) {
          e = e->e1;
          continue;
        }
        if (holds(ctx, e->tope2)) {
          e = e->e2;
          continue;
        }
        return e;
      }
      default:
        return e;
    }
  }
}

ExprPtr Checker::neutral_type(const TriContext& ctx, const ExprPtr& e) {
  switch (e->tag) {
    case Expr::Tag::Var: {
      if (e->var_index < 0 || e->var_index >= ctx.binder_depth()) return nullptr;
      const auto* tb = std::get_if<TriContext::TypeBinder>(&ctx.binder(e->var_index));
      return tb ? shift(tb->type, e->var_index + 1) : nullptr;
    }
    case Expr::Tag::Const: {
      const Declaration* d = env_.find(e->cname);
      return d && d->type ? d->type : nullptr;
    }
    case Expr::Tag::J:
      return j_rule_type();
    case Expr::Tag::App: {
      ExprPtr ft = neutral_type(ctx, e->e1);
      if (!ft) return nullptr;
      ExprPtr fw = whnf(ctx, ft);
      if (fw->tag == Expr::Tag::Pi) return open_binder(fw->e2, SubstArg(e->e2));
      if (fw->tag == Expr::Tag::Ext) {
        CubeTermPtr ct = try_cube(ctx, e->e2);
        return ct ? open_binder(fw->e1, SubstArg(ct)) : nullptr;
      }
      return nullptr;
    }
    case Expr::Tag::ExtApp: {
      ExprPtr ft = neutral_type(ctx, e->e1);
      if (!ft) return nullptr;
      ExprPtr fw = whnf(ctx, ft);
      return fw->tag == Expr::Tag::Ext ? open_binder(fw->e1, SubstArg(e->cterm)) : nullptr;
    }
    case Expr::Tag::Fst: {
      ExprPtr st = neutral_type(ctx, e->e1);
      if (!st) return nullptr;
      ExprPtr sw = whnf(ctx, st);
      return sw->tag == Expr::Tag::Sigma ? sw->e1 : nullptr;
    }
    case Expr::Tag::Snd: {
      ExprPtr st = neutral_type(ctx, e->e1);
      if (!st) return nullptr;
      ExprPtr sw = whnf(ctx, st);
      return sw->tag == Expr::Tag::Sigma
                 ? open_binder(sw->e2, SubstArg(mk::fst(e->e1)))
                 : nullptr;
    }
    default:
      return nullptr;
  }
}

const Expr* Checker::stuck_rec_or(const TriContext& ctx, const ExprPtr& e) {
  (void)ctx;
  const Expr* cur = e.get();
  for (;;) {
    switch (cur->tag) {
      case Expr::Tag::RecOr:
        return cur;
      case Expr::Tag::App:
      case Expr::Tag::ExtApp:
      case Expr::Tag::Fst:
      case Expr::Tag::Snd:
        cur = cur->e1.get();
        continue;
      default:
        return nullptr;
    }
  }
}

bool Checker::holds(const TriContext& ctx, const TopePtr& goal) {
  return solver_.entails(ctx, goal);
}

// ---------------------------------------------------------------------------
// Definitional equality

bool Checker::def_equal(const TriContext& ctx, const ExprPtr& a, const ExprPtr& b,
                        const ExprPtr& type) {
  if (holds(ctx, Tope::bot())) return true;
  ExprPtr ty = whnf(ctx, type);
  if (const Expr* r = stuck_rec_or(ctx, ty)) {
    // A classifier glued along a disjunction: compare under each guard.
    return def_equal(ctx.extended_tope(r->tope1), a, b, ty) &&
           def_equal(ctx.extended_tope(r->tope2), a, b, ty);
  }
  switch (ty->tag) {
    case Expr::Tag::Universe:
      return type_equal(ctx, a, b);
    case Expr::Tag::Pi: {
      TriContext in = ctx.extended_type(ty->binder, ty->e1);
      return def_equal(in, mk::app(shift(a, 1), mk::var(0)),
                       mk::app(shift(b, 1), mk::var(0)), ty->e2);
    }
    case Expr::Tag::Ext: {
      TriContext in = ctx.extended_cube(ty->binder, ty->cube, ty->leaves)
                          .extended_tope(ty->tope1);
      return def_equal(in, mk::ext_app(shift(a, 1), CubeTerm::var(0)),
                       mk::ext_app(shift(b, 1), CubeTerm::var(0)), ty->e1);
    }
    case Expr::Tag::Sigma: {
      if (!def_equal(ctx, mk::fst(a), mk::fst(b), ty->e1)) return false;
      return def_equal(ctx, mk::snd(a), mk::snd(b),
                       open_binder(ty->e2, SubstArg(mk::fst(a))));
    }
    default:
      return equal_base(ctx, whnf(ctx, a), whnf(ctx, b), ty);
  }
}

bool Checker::equal_base(const TriContext& ctx, const ExprPtr& a, const ExprPtr& b,
                         const ExprPtr& type) {
  if (const Expr* r = stuck_rec_or(ctx, a)) {
    return def_equal(ctx.extended_tope(r->tope1), a, b, type) &&
           def_equal(ctx.extended_tope(r->tope2), a, b, type);
  }
  if (const Expr* r = stuck_rec_or(ctx, b)) {
    return def_equal(ctx.extended_tope(r->tope1), a, b, type) &&
           def_equal(ctx.extended_tope(r->tope2), a, b, type);
  }
  if (a->tag == Expr::Tag::Refl || b->tag == Expr::Tag::Refl) return a->tag == b->tag;
  return neutral_equal(ctx, a, b).has_value();
}

std::optional<ExprPtr> Checker::neutral_equal(const TriContext& ctx, const ExprPtr& a,
                                              const ExprPtr& b) {
  if (a->tag != b->tag) return std::nullopt;
  switch (a->tag) {
    case Expr::Tag::Var: {
      if (a->var_index != b->var_index) return std::nullopt;
      const auto* tb = std::get_if<TriContext::TypeBinder>(&ctx.binder(a->var_index));
      if (!tb) return std::nullopt;
      return shift(tb->type, a->var_index + 1);
    }
    case Expr::Tag::Const: {
      if (a->cname != b->cname) return std::nullopt;
      const Declaration* d = env_.find(a->cname);
      if (!d || !d->type) return std::nullopt;
      return d->type;
    }
    case Expr::Tag::J:
      return j_rule_type();
    case Expr::Tag::App: {
      auto ft = neutral_equal(ctx, a->e1, b->e1);
      if (!ft) return std::nullopt;
      ExprPtr fw = whnf(ctx, *ft);
      if (fw->tag != Expr::Tag::Pi) return std::nullopt;
      if (!def_equal(ctx, a->e2, b->e2, fw->e1)) return std::nullopt;
      return open_binder(fw->e2, SubstArg(a->e2));
    }
    case Expr::Tag::ExtApp: {
      auto ft = neutral_equal(ctx, a->e1, b->e1);
      if (!ft) return std::nullopt;
      ExprPtr fw = whnf(ctx, *ft);
      if (fw->tag != Expr::Tag::Ext) return std::nullopt;
      // Tope equality is judgmental equality on cube arguments.
      if (!solver_.cube_equal(ctx, a->cterm, b->cterm)) return std::nullopt;
      return open_binder(fw->e1, SubstArg(a->cterm));
    }
    case Expr::Tag::Fst: {
      auto st = neutral_equal(ctx, a->e1, b->e1);
      if (!st) return std::nullopt;
      ExprPtr sw = whnf(ctx, *st);
      if (sw->tag != Expr::Tag::Sigma) return std::nullopt;
      return sw->e1;
    }
    case Expr::Tag::Snd: {
      auto st = neutral_equal(ctx, a->e1, b->e1);
      if (!st) return std::nullopt;
      ExprPtr sw = whnf(ctx, *st);
      if (sw->tag != Expr::Tag::Sigma) return std::nullopt;
      return open_binder(sw->e2, SubstArg(mk::fst(a->e1)));
    }
    default:
      return std::nullopt;
  }
}

bool Checker::type_equal(const TriContext& ctx, const ExprPtr& a, const ExprPtr& b) {
  if (holds(ctx, Tope::bot())) return true;
  ExprPtr aw = whnf(ctx, a);
  ExprPtr bw = whnf(ctx, b);
  if (const Expr* r = stuck_rec_or(ctx, aw)) {
    return type_equal(ctx.extended_tope(r->tope1), aw, bw) &&
           type_equal(ctx.extended_tope(r->tope2), aw, bw);
  }
  if (const Expr* r = stuck_rec_or(ctx, bw)) {
    return type_equal(ctx.extended_tope(r->tope1), aw, bw) &&
           type_equal(ctx.extended_tope(r->tope2), aw, bw);
  }
  if (aw->tag != bw->tag) return false;
  switch (aw->tag) {
    case Expr::Tag::Universe:
      return true;
    case Expr::Tag::Pi:
    case Expr::Tag::Sigma: {
      if (!type_equal(ctx, aw->e1, bw->e1)) return false;
      TriContext in = ctx.extended_type(aw->binder, aw->e1);
      return type_equal(in, aw->e2, bw->e2);
    }
    case Expr::Tag::Id: {
      if (!type_equal(ctx, aw->e1, bw->e1)) return false;
      return def_equal(ctx, aw->e2, bw->e2, aw->e1) &&
             def_equal(ctx, aw->e3, bw->e3, aw->e1);
    }
    case Expr::Tag::Ext: {
      if (!cube_shape_equal(*aw->cube, *bw->cube)) return false;
      TriContext single = TriContext().extended_cube(aw->binder, aw->cube, aw->leaves);
      auto same_tope = [&](const TopePtr& l, const TopePtr& r) {
        return solver_.entails(single, {l}, r) && solver_.entails(single, {r}, l);
      };
      if (!same_tope(aw->tope1, bw->tope1) || !same_tope(aw->tope2, bw->tope2))
        return false;
      TriContext in = ctx.extended_cube(aw->binder, aw->cube, aw->leaves);
      if (!type_equal(in.extended_tope(aw->tope1), aw->e1, bw->e1)) return false;
      return def_equal(in.extended_tope(aw->tope2), aw->e2, bw->e2, aw->e1);
    }
    default:
      return neutral_equal(ctx, aw, bw).has_value();
  }
}

// ---------------------------------------------------------------------------
// Checking and inference

void Checker::validate_ext(const TriContext& ctx, const ExprPtr& e, bool small) {
  TriContext single = TriContext().extended_cube(e->binder, e->cube, e->leaves);
  try {
    check_tope(single, e->tope1);
    check_tope(single, e->tope2);
  } catch (const CheckError& ce) {
    if (ce.diag.code == DiagCode::UnboundVariable)
      fail(DiagCode::IllFormedTope,
           "extension topes may mention only the bound cube variable", e->span);
    throw;
  }
  if (!solver_.entails(single, {e->tope2}, e->tope1))
    fail(DiagCode::TopeSideConditionFailed,
         "boundary tope is not included in the domain tope", e->span,
         render_entailment(single, {e->tope2}, e->tope1));
  TriContext in = ctx.extended_cube(e->binder, e->cube, e->leaves);
  if (small)
    check(in.extended_tope(e->tope1), e->e1, mk::universe());
  else
    check_type(in.extended_tope(e->tope1), e->e1);
  check(in.extended_tope(e->tope2), e->e2, e->e1);
}

void Checker::check_type(const TriContext& ctx, const ExprPtr& e) {
  switch (e->tag) {
    case Expr::Tag::Universe:
      return;
    case Expr::Tag::Pi:
    case Expr::Tag::Sigma:
      check_type(ctx, e->e1);
      check_type(ctx.extended_type(e->binder, e->e1), e->e2);
      return;
    case Expr::Tag::Id:
      check_type(ctx, e->e1);
      check(ctx, e->e2, e->e1);
      check(ctx, e->e3, e->e1);
      return;
    case Expr::Tag::Ext:
      validate_ext(ctx, e, false);
      return;
    default:
      check(ctx, e, mk::universe());
      return;
  }
}

ExprPtr Checker::infer(const TriContext& ctx, const ExprPtr& e) {
  switch (e->tag) {
    case Expr::Tag::Var: {
      if (e->var_index < 0 || e->var_index >= ctx.binder_depth())
        fail(DiagCode::UnboundVariable, "variable index out of scope", e->span);
      const TriContext::Entry& entry = ctx.binder(e->var_index);
      if (const auto* tb = std::get_if<TriContext::TypeBinder>(&entry))
        return shift(tb->type, e->var_index + 1);
      fail(DiagCode::NotATerm,
           "cube variable '" + ctx.display_name(e->var_index) + "' used as a term",
           e->span);
    }
    case Expr::Tag::Universe:
      fail(DiagCode::UniverseInUniverse, "U is not an element of U", e->span);
    case Expr::Tag::Pi:
    case Expr::Tag::Sigma:
      check(ctx, e->e1, mk::universe());
      check(ctx.extended_type(e->binder, e->e1), e->e2, mk::universe());
      return mk::universe();
    case Expr::Tag::Id:
      check(ctx, e->e1, mk::universe());
      check(ctx, e->e2, e->e1);
      check(ctx, e->e3, e->e1);
      return mk::universe();
    case Expr::Tag::Ext:
      validate_ext(ctx, e, true);
      return mk::universe();
    case Expr::Tag::J:
      return j_rule_type();
    case Expr::Tag::Const: {
      const Declaration* d = env_.find(e->cname);
      if (!d) fail(DiagCode::UnboundVariable, "unknown name " + describe(e), e->span);
      if (d->kind == Declaration::Kind::ShapeAlias)
        fail(DiagCode::NotATerm, "shape " + describe(e) + " used as a term", e->span);
      return d->type;
    }
    case Expr::Tag::App: {
      ExprPtr tf = whnf(ctx, infer(ctx, e->e1));
      if (tf->tag == Expr::Tag::Pi) {
        check(ctx, e->e2, tf->e1);
        return open_binder(tf->e2, SubstArg(e->e2));
      }
      if (tf->tag == Expr::Tag::Ext) {
        CubeTermPtr ct = expr_to_cube(ctx, e->e2);
        CubeShapePtr sort = cube_sort(ctx, ct);
        if (!cube_shape_equal(*sort, *tf->cube))
          fail(DiagCode::SortMismatch, "argument does not inhabit the domain cube",
               e->span);
        TopePtr goal = open_binder(tf->tope1, ct);
        if (!holds(ctx, goal))
          fail(DiagCode::TopeSideConditionFailed,
               "argument is not in the domain shape", e->span,
               render_entailment(ctx, ctx.hypotheses(), goal));
        return open_binder(tf->e1, SubstArg(ct));
      }
      fail(DiagCode::NotAFunction, "applied " + describe(e->e1) + " of non-function type",
           e->span);
    }
    case Expr::Tag::ExtApp: {
      ExprPtr tf = whnf(ctx, infer(ctx, e->e1));
      if (tf->tag != Expr::Tag::Ext)
        fail(DiagCode::NotAFunction,
             "applied " + describe(e->e1) + " of non-extension type", e->span);
      CubeShapePtr sort = cube_sort(ctx, e->cterm);
      if (!cube_shape_equal(*sort, *tf->cube))
        fail(DiagCode::SortMismatch, "argument does not inhabit the domain cube", e->span);
      TopePtr goal = open_binder(tf->tope1, e->cterm);
      if (!holds(ctx, goal))
        fail(DiagCode::TopeSideConditionFailed, "argument is not in the domain shape",
             e->span, render_entailment(ctx, ctx.hypotheses(), goal));
      return open_binder(tf->e1, SubstArg(e->cterm));
    }
    case Expr::Tag::Fst: {
      ExprPtr tp = whnf(ctx, infer(ctx, e->e1));
      if (tp->tag != Expr::Tag::Sigma)
        fail(DiagCode::TypeMismatch, "first projection of a non-pair", e->span);
      return tp->e1;
    }
    case Expr::Tag::Snd: {
      ExprPtr tp = whnf(ctx, infer(ctx, e->e1));
      if (tp->tag != Expr::Tag::Sigma)
        fail(DiagCode::TypeMismatch, "second projection of a non-pair", e->span);
      return open_binder(tp->e2, SubstArg(mk::fst(e->e1)));
    }
    case Expr::Tag::RecOr: {
      ExprPtr a;
      try {
        a = infer(ctx.extended_tope(e->tope1), e->e1);
      } catch (const CheckError& ce) {
        if (ce.diag.code != DiagCode::NotInferable) throw;
        a = infer(ctx.extended_tope(e->tope2), e->e2);
      }
      check(ctx, e, a);
      return a;
    }
    case Expr::Tag::Lam:
      fail(DiagCode::NotInferable, "function literal needs a type annotation", e->span);
    case Expr::Tag::Pair:
      fail(DiagCode::NotInferable, "pair needs a type annotation", e->span);
    case Expr::Tag::Refl:
      fail(DiagCode::NotInferable, "refl needs a type annotation", e->span);
    case Expr::Tag::RecBot:
      fail(DiagCode::NotInferable, "recBOT needs a type annotation", e->span);
    case Expr::Tag::CubeE:
      fail(DiagCode::NotATerm, "cube term in expression position", e->span);
  }
  fail(DiagCode::SyntaxError, "malformed expression", e->span);
}

void Checker::check(const TriContext& ctx, const ExprPtr& e, const ExprPtr& type) {
  ExprPtr ty = whnf(ctx, type);
  if (const Expr* r = stuck_rec_or(ctx, ty)) {
    check(ctx.extended_tope(r->tope1), e, ty);
    check(ctx.extended_tope(r->tope2), e, ty);
    return;
  }
  switch (e->tag) {
    case Expr::Tag::Lam: {
      if (ty->tag == Expr::Tag::Pi) {
        std::string name = e->binder.empty() ? ty->binder : e->binder;
        check(ctx.extended_type(name, ty->e1), e->e1, ty->e2);
        return;
      }
      if (ty->tag == Expr::Tag::Ext) {
        std::string name = e->binder.empty() ? ty->binder : e->binder;
        std::vector<std::string> leaves = e->leaves.empty() ? ty->leaves : e->leaves;
        TriContext in = ctx.extended_cube(name, ty->cube, leaves);
        check(in.extended_tope(ty->tope1), e->e1, ty->e1);
        // The defining obligation: on the boundary tope the body must BE
        // the prescribed section, disjunct by disjunct.
        std::vector<TopePtr> faces;
        or_list(ty->tope2, faces);
        for (const TopePtr& face : faces) {
          TriContext on = in.extended_tope(face);
          if (!def_equal(on, e->e1, ty->e2, ty->e1))
            fail(DiagCode::BoundaryMismatch,
                 "body disagrees with the required boundary section", e->span,
                 "on " + render_tope(in, face));
        }
        return;
      }
      fail(DiagCode::NotAFunction,
           "function literal checked against " + describe(ty), e->span);
    }
    case Expr::Tag::Pair: {
      if (ty->tag != Expr::Tag::Sigma)
        fail(DiagCode::TypeMismatch, "pair checked against " + describe(ty), e->span);
      check(ctx, e->e1, ty->e1);
      check(ctx, e->e2, open_binder(ty->e2, SubstArg(e->e1)));
      return;
    }
    case Expr::Tag::Refl: {
      if (ty->tag != Expr::Tag::Id)
        fail(DiagCode::TypeMismatch, "refl checked against " + describe(ty), e->span);
      if (!def_equal(ctx, ty->e2, ty->e3, ty->e1))
        fail(DiagCode::TypeMismatch,
             "refl requires definitionally equal endpoints", e->span);
      return;
    }
    case Expr::Tag::RecBot: {
      if (!holds(ctx, Tope::bot()))
        fail(DiagCode::TopeSideConditionFailed,
             "recBOT requires an inconsistent tope context", e->span,
             render_entailment(ctx, ctx.hypotheses(), Tope::bot()));
      return;
    }
    case Expr::Tag::RecOr: {
      check_tope(ctx, e->tope1);
      check_tope(ctx, e->tope2);
      TopePtr cover = Tope::disj(e->tope1, e->tope2);
      if (!holds(ctx, cover))
        fail(DiagCode::TopeSideConditionFailed,
             "recOR guards do not cover the tope context", e->span,
             render_entailment(ctx, ctx.hypotheses(), cover));
      check(ctx.extended_tope(e->tope1), e->e1, ty);
      check(ctx.extended_tope(e->tope2), e->e2, ty);
      TopePtr overlap = Tope::conj(e->tope1, e->tope2);
      if (!def_equal(ctx.extended_tope(overlap), e->e1, e->e2, ty))
        fail(DiagCode::BoundaryMismatch, "recOR branches disagree on the overlap",
             e->span, "on " + render_tope(ctx, overlap));
      return;
    }
    default: {
      ExprPtr it = infer(ctx, e);
      if (!type_equal(ctx, it, ty))
        fail(DiagCode::TypeMismatch,
             "expression has " + describe(whnf(ctx, it)) + " where " + describe(ty) +
                 " is required",
             e->span);
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Normalization

ExprPtr Checker::normalize(const TriContext& ctx, const ExprPtr& e, const ExprPtr& type) {
  // Under an inconsistent tope context every term is recBOT.
  if (holds(ctx, Tope::bot())) return mk::rec_bot();
  ExprPtr ty = whnf(ctx, type);
  switch (ty->tag) {
    case Expr::Tag::Universe:
      return normalize_type(ctx, e);
    case Expr::Tag::Pi: {
      TriContext in = ctx.extended_type(ty->binder, ty->e1);
      ExprPtr body = normalize(in, mk::app(shift(e, 1), mk::var(0)), ty->e2);
      return mk::lam(ty->binder, body);
    }
    case Expr::Tag::Ext: {
      TriContext in = ctx.extended_cube(ty->binder, ty->cube, ty->leaves)
                          .extended_tope(ty->tope1);
      ExprPtr body = normalize(in, mk::ext_app(shift(e, 1), CubeTerm::var(0)), ty->e1);
      return mk::lam(ty->binder, ty->leaves, body);
    }
    case Expr::Tag::Sigma: {
      ExprPtr f = normalize(ctx, mk::fst(e), ty->e1);
      ExprPtr s = normalize(ctx, mk::snd(e), open_binder(ty->e2, SubstArg(mk::fst(e))));
      return mk::pair(f, s);
    }
    default: {
      ExprPtr w = whnf(ctx, e);
      if (w->tag == Expr::Tag::Refl) return w;
      if (w->tag == Expr::Tag::RecOr) {
        ExprPtr l = normalize(ctx.extended_tope(w->tope1), w->e1, ty);
        ExprPtr r = normalize(ctx.extended_tope(w->tope2), w->e2, ty);
        return mk::rec_or(w->tope1, w->tope2, l, r);
      }
      return normalize_neutral(ctx, w, nullptr);
    }
  }
}

ExprPtr Checker::normalize_neutral(const TriContext& ctx, const ExprPtr& e,
                                   ExprPtr* type_out) {
  auto give = [&](ExprPtr ty) {
    if (type_out) *type_out = std::move(ty);
  };
  switch (e->tag) {
    case Expr::Tag::Var: {
      give(neutral_type(ctx, e));
      return e;
    }
    case Expr::Tag::Const:
    case Expr::Tag::J: {
      give(neutral_type(ctx, e));
      return e;
    }
    case Expr::Tag::App: {
      ExprPtr ft;
      ExprPtr f = normalize_neutral(ctx, e->e1, &ft);
      ExprPtr fw = ft ? whnf(ctx, ft) : nullptr;
      if (fw && fw->tag == Expr::Tag::Ext) {
        CubeTermPtr s = normalize_cube(ctx, expr_to_cube(ctx, e->e2));
        give(open_binder(fw->e1, SubstArg(s)));
        return mk::ext_app(f, s);
      }
      if (!fw || fw->tag != Expr::Tag::Pi)
        fail(DiagCode::NotAFunction, "applied " + describe(e->e1) + " of non-function type",
             e->span);
      ExprPtr a = normalize(ctx, e->e2, fw->e1);
      give(open_binder(fw->e2, SubstArg(a)));
      return mk::app(f, a);
    }
    case Expr::Tag::ExtApp: {
      ExprPtr ft;
      ExprPtr f = normalize_neutral(ctx, e->e1, &ft);
      ExprPtr fw = ft ? whnf(ctx, ft) : nullptr;
      if (!fw || fw->tag != Expr::Tag::Ext)
        fail(DiagCode::NotAFunction,
             "applied " + describe(e->e1) + " of non-extension type", e->span);
      CubeTermPtr s = normalize_cube(ctx, e->cterm);
      give(open_binder(fw->e1, SubstArg(s)));
      return mk::ext_app(f, s);
    }
    case Expr::Tag::Fst: {
      ExprPtr st;
      ExprPtr p = normalize_neutral(ctx, e->e1, &st);
      ExprPtr sw = st ? whnf(ctx, st) : nullptr;
      if (!sw || sw->tag != Expr::Tag::Sigma)
        fail(DiagCode::TypeMismatch, "first projection of a non-pair", e->span);
      give(sw->e1);
      return mk::fst(p);
    }
    case Expr::Tag::Snd: {
      ExprPtr st;
      ExprPtr p = normalize_neutral(ctx, e->e1, &st);
      ExprPtr sw = st ? whnf(ctx, st) : nullptr;
      if (!sw || sw->tag != Expr::Tag::Sigma)
        fail(DiagCode::TypeMismatch, "second projection of a non-pair", e->span);
      give(open_binder(sw->e2, SubstArg(mk::fst(e->e1))));
      return mk::snd(p);
    }
    case Expr::Tag::RecOr: {
      ExprPtr a = infer(ctx, e);
      ExprPtr l = normalize(ctx.extended_tope(e->tope1), e->e1, a);
      ExprPtr r = normalize(ctx.extended_tope(e->tope2), e->e2, a);
      give(a);
      return mk::rec_or(e->tope1, e->tope2, l, r);
    }
    default:
      give(nullptr);
      return e;
  }
}

ExprPtr Checker::normalize_type(const TriContext& ctx, const ExprPtr& t) {
  ExprPtr w = whnf(ctx, t);
  switch (w->tag) {
    case Expr::Tag::Universe:
      return w;
    case Expr::Tag::Pi: {
      ExprPtr dom = normalize_type(ctx, w->e1);
      ExprPtr cod = normalize_type(ctx.extended_type(w->binder, dom), w->e2);
      return mk::pi(w->binder, dom, cod);
    }
    case Expr::Tag::Sigma: {
      ExprPtr dom = normalize_type(ctx, w->e1);
      ExprPtr cod = normalize_type(ctx.extended_type(w->binder, dom), w->e2);
      return mk::sigma(w->binder, dom, cod);
    }
    case Expr::Tag::Id: {
      ExprPtr a = normalize_type(ctx, w->e1);
      return mk::id(a, normalize(ctx, w->e2, a), normalize(ctx, w->e3, a));
    }
    case Expr::Tag::Ext: {
      TriContext in = ctx.extended_cube(w->binder, w->cube, w->leaves);
      ExprPtr fam = normalize_type(in.extended_tope(w->tope1), w->e1);
      ExprPtr bdry = normalize(in.extended_tope(w->tope2), w->e2, w->e1);
      return mk::ext(w->binder, w->leaves, w->cube, w->tope1, w->tope2, fam, bdry);
    }
    default:
      return normalize_neutral(ctx, w, nullptr);
  }
}

// ---------------------------------------------------------------------------
// Bridges and globals

CubeTermPtr Checker::expr_to_cube(const TriContext& ctx, const ExprPtr& e) {
  if (CubeTermPtr t = try_cube(ctx, e)) return t;
  fail(DiagCode::SortMismatch, "expected a point of a cube, found " + describe(e),
       e->span);
}

const ExprPtr& Checker::j_rule_type() {
  using namespace mk;
  static const ExprPtr ty = pi(
      "A", universe(),
      pi("a", var(0),
         pi("C",
            pi("y", var(1), pi("_", id(var(2), var(1), var(0)), universe())),
            pi("d", app(app(var(0), var(1)), refl()),
               pi("b", var(3),
                  pi("p", id(var(4), var(3), var(0)),
                     app(app(var(3), var(1)), var(0))))))));
  return ty;
}

void check_declaration(Environment& env, Solver& solver, Declaration d) {
  if (env.find(d.name)) {
    Diagnostic dg{DiagCode::DuplicateName, d.file, d.span,
                  "'" + d.name + "' is already declared", ""};
    throw CheckError(std::move(dg));
  }
  Checker ck(env, solver);
  TriContext ctx;
  try {
    switch (d.kind) {
      case Declaration::Kind::ShapeAlias: {
        // shape_leaves holds the binding pattern: one name for the whole
        // cube, or one name per interval factor.
        TriContext single =
            d.shape_leaves.size() == 1
                ? TriContext().extended_cube(d.shape_leaves[0], d.shape->cube)
                : TriContext().extended_cube("t", d.shape->cube, d.shape_leaves);
        check_tope(single, d.shape->tope);
        break;
      }
      case Declaration::Kind::Postulate:
        ck.check_type(ctx, d.type);
        break;
      case Declaration::Kind::Definition:
        ck.check_type(ctx, d.type);
        ck.check(ctx, d.body, d.type);
        break;
    }
  } catch (const CheckError& ce) {
    Diagnostic dg = ce.diag;
    if (dg.file.empty()) dg.file = d.file;
    if (!dg.span.known()) dg.span = d.span;
    throw CheckError(std::move(dg));
  }
  env.declare(std::move(d));
}

}  // namespace stt
