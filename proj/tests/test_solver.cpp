#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "stt/oracle.hpp"
#include "stt/solver.hpp"
#include "stt/syntax.hpp"

using namespace stt;
using stt::test::Gen;
using stt::test::interval_ctx;
using stt::test::pos_var;

namespace {

std::vector<CubeShapePtr> interval_shapes(int n) {
  return std::vector<CubeShapePtr>(static_cast<size_t>(n), CubeShape::interval());
}

bool solver_entails(const TriContext& ctx, const std::vector<TopePtr>& hyps,
                    const TopePtr& goal) {
  Solver s;  // fresh instance: no cross-test cache effects
  return s.entails(ctx, hyps, goal);
}

// All interval terms over n variables plus both endpoints.
std::vector<CubeTermPtr> term_pool(int n) {
  std::vector<CubeTermPtr> out = {CubeTerm::zero(), CubeTerm::one()};
  for (int i = 0; i < n; ++i) out.push_back(CubeTerm::var(i));
  return out;
}

std::vector<TopePtr> atom_pool(int n) {
  std::vector<TopePtr> out;
  for (const auto& s : term_pool(n))
    for (const auto& t : term_pool(n)) {
      out.push_back(Tope::leq(s, t));
      out.push_back(Tope::eq(s, t));
    }
  return out;
}

// Distinct weak total orders over {0, 1, vars} realizable by chain
// assignments, counted independently of the solver's branch machinery.
int assignment_order_count(int nvars, const std::vector<TopePtr>& hyps) {
  int k = nvars;
  std::vector<int> val(static_cast<size_t>(k), 0);
  std::set<std::string> sigs;
  auto satisfies = [&](const TopePtr& t) {
    auto eval_term = [&](const CubeTermPtr& c) -> int {
      switch (c->tag) {
        case CubeTerm::Tag::Zero: return 0;
        case CubeTerm::Tag::One: return k + 1;
        case CubeTerm::Tag::Var: return val[static_cast<size_t>(k - 1 - c->index)];
        default: REQUIRE(false); return 0;
      }
    };
    std::function<bool(const TopePtr&)> ev = [&](const TopePtr& p) -> bool {
      switch (p->tag) {
        case Tope::Tag::Top: return true;
        case Tope::Tag::Bot: return false;
        case Tope::Tag::And: return ev(p->l) && ev(p->r);
        case Tope::Tag::Or: return ev(p->l) || ev(p->r);
        case Tope::Tag::Eq: return eval_term(p->s) == eval_term(p->t);
        case Tope::Tag::Leq: return eval_term(p->s) <= eval_term(p->t);
      }
      return false;
    };
    return ev(t);
  };
  int total = 1;
  for (int i = 0; i < k; ++i) total *= k + 2;
  for (int a = 0; a < total; ++a) {
    int rest = a;
    for (int i = 0; i < k; ++i) {
      val[static_cast<size_t>(i)] = rest % (k + 2);
      rest /= k + 2;
    }
    bool ok = true;
    for (const auto& h : hyps)
      if (!satisfies(h)) { ok = false; break; }
    if (!ok) continue;
    // Signature: pairwise order of all terms 0, vars..., 1.
    std::vector<int> pts = {0};
    for (int i = 0; i < k; ++i) pts.push_back(val[static_cast<size_t>(i)]);
    pts.push_back(k + 1);
    std::string sig;
    for (size_t i = 0; i < pts.size(); ++i)
      for (size_t j = 0; j < pts.size(); ++j)
        sig += pts[i] <= pts[j] ? '1' : '0';
    sigs.insert(sig);
  }
  return static_cast<int>(sigs.size());
}

}  // namespace

TEST_CASE("strict interval axioms") {
  TriContext c2 = interval_ctx(2);
  TriContext c3 = interval_ctx(3);
  CubeTermPtr x = pos_var(2, 0), y = pos_var(2, 1);
  CubeTermPtr x3 = pos_var(3, 0), y3 = pos_var(3, 1), z3 = pos_var(3, 2);

  // Reflexivity.
  CHECK(solver_entails(c2, {}, Tope::leq(x, x)));
  // Transitivity.
  CHECK(solver_entails(c3, {Tope::leq(x3, y3), Tope::leq(y3, z3)}, Tope::leq(x3, z3)));
  // Antisymmetry yields equality.
  CHECK(solver_entails(c2, {Tope::leq(x, y), Tope::leq(y, x)}, Tope::eq(x, y)));
  // Totality.
  CHECK(solver_entails(c2, {}, Tope::disj(Tope::leq(x, y), Tope::leq(y, x))));
  // Endpoints.
  CHECK(solver_entails(c2, {}, Tope::leq(CubeTerm::zero(), x)));
  CHECK(solver_entails(c2, {}, Tope::leq(x, CubeTerm::one())));
  // Distinctness of the endpoints.
  CHECK(solver_entails(c2, {Tope::eq(CubeTerm::zero(), CubeTerm::one())}, Tope::bot()));

  // Non-theorems.
  CHECK_FALSE(solver_entails(c2, {}, Tope::leq(x, y)));
  CHECK_FALSE(solver_entails(c2, {}, Tope::eq(x, y)));
  CHECK_FALSE(solver_entails(c2, {Tope::leq(x, y)}, Tope::leq(y, x)));
  CHECK_FALSE(solver_entails(c2, {}, Tope::bot()));
}

TEST_CASE("equality is a congruent equivalence") {
  TriContext c3 = interval_ctx(3);
  CubeTermPtr x = pos_var(3, 0), y = pos_var(3, 1), z = pos_var(3, 2);
  CHECK(solver_entails(c3, {}, Tope::eq(x, x)));
  CHECK(solver_entails(c3, {Tope::eq(x, y)}, Tope::eq(y, x)));
  CHECK(solver_entails(c3, {Tope::eq(x, y), Tope::eq(y, z)}, Tope::eq(x, z)));
  // Substitutive into order.
  CHECK(solver_entails(c3, {Tope::eq(x, y), Tope::leq(y, z)}, Tope::leq(x, z)));
  CHECK(solver_entails(c3, {Tope::eq(x, y), Tope::leq(z, y)}, Tope::leq(z, x)));
}

TEST_CASE("product and unit equality decompose") {
  TriContext ctx = TriContext()
                       .extended_cube("p", CubeShape::power(2))
                       .extended_cube("q", CubeShape::power(2));
  CubeTermPtr p = CubeTerm::var(1), q = CubeTerm::var(0);
  TopePtr peq = Tope::eq(p, q);
  CHECK(solver_entails(ctx, {peq}, Tope::eq(CubeTerm::proj(1, p), CubeTerm::proj(1, q))));
  CHECK(solver_entails(ctx, {peq}, Tope::eq(CubeTerm::proj(2, p), CubeTerm::proj(2, q))));
  CHECK_FALSE(solver_entails(ctx, {}, peq));

  // Componentwise equality rebuilds the pair equality.
  CHECK(solver_entails(ctx,
                       {Tope::eq(CubeTerm::proj(1, p), CubeTerm::proj(1, q)),
                        Tope::eq(CubeTerm::proj(2, p), CubeTerm::proj(2, q))},
                       peq));

  // Pairing is injective.
  TriContext c4 = interval_ctx(4);
  CubeTermPtr a = pos_var(4, 0), b = pos_var(4, 1), c = pos_var(4, 2), d = pos_var(4, 3);
  TopePtr pairs_eq = Tope::eq(CubeTerm::pair(a, b), CubeTerm::pair(c, d));
  CHECK(solver_entails(c4, {pairs_eq}, Tope::eq(a, c)));
  CHECK(solver_entails(c4, {pairs_eq}, Tope::eq(b, d)));

  // Unit equations hold trivially.
  TriContext cu = TriContext()
                      .extended_cube("u", CubeShape::unit())
                      .extended_cube("v", CubeShape::unit());
  CHECK(solver_entails(cu, {}, Tope::eq(CubeTerm::var(0), CubeTerm::var(1))));
}

TEST_CASE("projection expressions reduce inside topes") {
  TriContext c2 = interval_ctx(2);
  CubeTermPtr x = pos_var(2, 0), y = pos_var(2, 1);
  CHECK(solver_entails(c2, {}, Tope::eq(CubeTerm::proj(1, CubeTerm::pair(x, y)), x)));
  CHECK(solver_entails(c2, {}, Tope::eq(CubeTerm::proj(2, CubeTerm::pair(x, y)), y)));

  TriContext cp = TriContext().extended_cube("p", CubeShape::power(2));
  CubeTermPtr p = CubeTerm::var(0);
  CHECK(solver_entails(
      cp, {}, Tope::eq(p, CubeTerm::pair(CubeTerm::proj(1, p), CubeTerm::proj(2, p)))));
}

TEST_CASE("disjunction splits and conjunction distributes") {
  TriContext c2 = interval_ctx(2);
  CubeTermPtr x = pos_var(2, 0), y = pos_var(2, 1);
  TopePtr x0 = Tope::eq(x, CubeTerm::zero());
  TopePtr x1 = Tope::eq(x, CubeTerm::one());
  TopePtr y0 = Tope::eq(y, CubeTerm::zero());

  CHECK(solver_entails(c2, {Tope::disj(x0, x1)}, Tope::disj(x1, x0)));
  CHECK(solver_entails(c2, {Tope::disj(x0, x0)}, x0));
  CHECK_FALSE(solver_entails(c2, {Tope::disj(x0, x1)}, x0));
  CHECK(solver_entails(c2, {x0}, Tope::disj(x0, x1)));

  // /\ distributes over \/ in both directions.
  TopePtr lhs = Tope::conj(y0, Tope::disj(x0, x1));
  TopePtr rhs = Tope::disj(Tope::conj(y0, x0), Tope::conj(y0, x1));
  CHECK(solver_entails(c2, {lhs}, rhs));
  CHECK(solver_entails(c2, {rhs}, lhs));
}

TEST_CASE("hypothesis topes stored in the context participate") {
  TriContext ctx = TriContext()
                       .extended_cube("x", CubeShape::interval())
                       .extended_tope(Tope::leq(CubeTerm::var(0), CubeTerm::zero()))
                       .extended_cube("y", CubeShape::interval());
  // x <= 0 forces x === 0 even after y enters scope.
  Solver s;
  CHECK(s.entails(ctx, Tope::eq(CubeTerm::var(1), CubeTerm::zero())));
  CHECK_FALSE(s.entails(ctx, Tope::eq(CubeTerm::var(0), CubeTerm::zero())));
  CHECK(s.entails(ctx, {Tope::leq(CubeTerm::var(0), CubeTerm::var(1))},
                  Tope::eq(CubeTerm::var(0), CubeTerm::zero())));
}

TEST_CASE("saturation branch counts are frozen") {
  Solver s;
  TriContext c1 = interval_ctx(1);
  auto b1 = s.saturate_branches(c1, {});
  CHECK(b1.size() == 3);  // x===0, 0<x<1, x===1
  for (const auto& b : b1) CHECK(b.consistent());
  CHECK(assignment_order_count(1, {}) == 3);

  TriContext c2 = interval_ctx(2);
  auto b2 = s.saturate_branches(c2, {});
  CHECK(b2.size() == 11);
  CHECK(assignment_order_count(2, {}) == 11);

  // Inconsistent hypotheses admit no order at all.
  CHECK(s.saturate_branches(c1, {Tope::eq(CubeTerm::zero(), CubeTerm::one())}).empty());
  CHECK(s.saturate_branches(c1, {Tope::bot()}).empty());
  CHECK(s.saturate_branches(
             c1, {Tope::eq(CubeTerm::var(0), CubeTerm::zero()),
                  Tope::eq(CubeTerm::var(0), CubeTerm::one())})
            .empty());

  // One consistent branch when a variable is pinned to an endpoint.
  auto bp = s.saturate_branches(c1, {Tope::eq(CubeTerm::var(0), CubeTerm::zero())});
  REQUIRE(bp.size() == 1);
  CHECK(bp[0].consistent());
  ITerm xv = ITerm::var(0, {});
  CHECK(bp[0].same_class(xv, ITerm::zero()));
  CHECK(bp[0].canonical_rep(xv) == ITerm::zero());
  CHECK(bp[0].chain_rank(xv) == 0);
  CHECK(bp[0].chain_rank(ITerm::one()) == 1);
}

TEST_CASE("branch queries and rendering") {
  Solver s;
  TriContext c2 = interval_ctx(2);
  CubeTermPtr x = pos_var(2, 0), y = pos_var(2, 1);
  auto branches =
      s.saturate_branches(c2, {Tope::leq(x, y), Tope::leq(y, x)});
  int mid_branches = 0;
  for (const auto& b : branches) {
    REQUIRE(b.consistent());
    ITerm xv = ITerm::var(0, {}), yv = ITerm::var(1, {});
    CHECK(b.same_class(xv, yv));
    CHECK(canonical_rep(b, xv) == canonical_rep(b, yv));
    if (!b.same_class(xv, ITerm::zero()) && !b.same_class(xv, ITerm::one())) {
      ++mid_branches;
      // The least member of the class {x, y} in the fixed term order is x.
      CHECK(canonical_rep(b, yv) == xv);
    }
  }
  CHECK(branches.size() == 3);
  CHECK(mid_branches == 1);

  CHECK_THROWS_AS((void)branches[0].leq(ITerm::var(7, {}), ITerm::zero()), CheckError);

  auto cm = s.countermodel(c2, {}, Tope::leq(x, y));
  REQUIRE(cm.has_value());
  CHECK(cm->find('x') != std::string::npos);
  CHECK(cm->find('y') != std::string::npos);

  auto none = s.countermodel(c2, {Tope::leq(x, y), Tope::leq(y, x)}, Tope::eq(x, y));
  CHECK_FALSE(none.has_value());

  // Deterministic rendering of the all-free saturation.
  auto all = s.saturate_branches(interval_ctx(1), {});
  std::vector<std::string> shown;
  for (const auto& b : all) shown.push_back(render_branch(interval_ctx(1), b));
  std::set<std::string> uniq(shown.begin(), shown.end());
  CHECK(uniq.size() == shown.size());
  bool has_pinned_bottom = false;
  for (const auto& r : shown)
    if (r.find("0 === x") != std::string::npos) has_pinned_bottom = true;
  CHECK(has_pinned_bottom);
}

TEST_CASE("memoization is transparent") {
  Solver s;
  TriContext c2 = interval_ctx(2);
  CubeTermPtr x = pos_var(2, 0), y = pos_var(2, 1);
  TopePtr goal = Tope::disj(Tope::leq(x, y), Tope::leq(y, x));
  bool first = s.entails(c2, {}, goal);
  size_t size_after = s.cache_size();
  bool second = s.entails(c2, {}, goal);
  CHECK(first == second);
  CHECK(s.cache_size() == size_after);
  s.clear_cache();
  CHECK(s.cache_size() == 0);
  CHECK(s.entails(c2, {}, goal) == first);
}

TEST_CASE("cut and weakening hold on random instances") {
  Gen g(97, 3);
  TriContext c3 = interval_ctx(3);
  int cut_checked = 0;
  for (int i = 0; i < 600; ++i) {
    auto hyps = g.hyps(g.below(3));
    TopePtr mid = g.tope(1);
    TopePtr goal = g.tope(1);
    Solver s;
    if (s.entails(c3, hyps, mid)) {
      auto extended = hyps;
      extended.push_back(mid);
      if (s.entails(c3, extended, goal)) {
        ++cut_checked;
        CHECK(s.entails(c3, hyps, goal));
      }
    }
    // Weakening: adding hypotheses never loses a conclusion.
    if (s.entails(c3, hyps, goal)) {
      auto extended = hyps;
      extended.push_back(g.atom());
      CHECK(s.entails(c3, extended, goal));
    }
  }
  CHECK(cut_checked > 20);
}

TEST_CASE("oracle agreement, exhaustive on one variable") {
  auto atoms = atom_pool(1);
  auto shapes = interval_shapes(1);
  TriContext c1 = interval_ctx(1);
  Solver s;
  int queries = 0;
  for (size_t i = 0; i < atoms.size(); ++i)
    for (size_t j = i; j < atoms.size(); ++j)
      for (const auto& goal : atoms) {
        std::vector<TopePtr> hyps = {atoms[i], atoms[j]};
        bool got = s.entails(c1, hyps, goal);
        bool want = oracle_entails(shapes, hyps, goal);
        ++queries;
        if (got != want) {
          CAPTURE(i);
          CAPTURE(j);
          REQUIRE(got == want);
        }
      }
  CHECK(queries == 171 * 18);
}

TEST_CASE("oracle agreement on random deep topes") {
  for (int nvars : {2, 3}) {
    Gen g(1234u + static_cast<uint32_t>(nvars), nvars);
    TriContext ctx = interval_ctx(nvars);
    auto shapes = interval_shapes(nvars);
    Solver s;
    for (int i = 0; i < 800; ++i) {
      std::vector<TopePtr> hyps;
      int nh = g.below(3);
      for (int h = 0; h < nh; ++h) hyps.push_back(g.tope(2));
      TopePtr goal = g.tope(2);
      bool got = s.entails(ctx, hyps, goal);
      bool want = oracle_entails(shapes, hyps, goal);
      if (got != want) {
        CAPTURE(nvars);
        CAPTURE(i);
        REQUIRE(got == want);
      }
    }
  }
}

TEST_CASE("oracle agreement with product binders") {
  // The solver atomizes projection paths; the oracle works over leaves.
  TriContext ctx = TriContext().extended_cube("p", CubeShape::power(2));
  std::vector<CubeShapePtr> shapes = {CubeShape::power(2)};
  CubeTermPtr p = CubeTerm::var(0);
  CubeTermPtr p1 = CubeTerm::proj(1, p), p2 = CubeTerm::proj(2, p);
  Solver s;

  std::vector<CubeTermPtr> terms = {CubeTerm::zero(), CubeTerm::one(), p1, p2};
  std::vector<TopePtr> atoms;
  for (const auto& a : terms)
    for (const auto& b : terms) {
      atoms.push_back(Tope::leq(a, b));
      atoms.push_back(Tope::eq(a, b));
    }
  atoms.push_back(Tope::eq(p, CubeTerm::pair(CubeTerm::zero(), p2)));
  atoms.push_back(Tope::eq(p, CubeTerm::pair(p2, p1)));

  for (const auto& h : atoms)
    for (const auto& goal : atoms) {
      std::vector<TopePtr> hyps = {h};
      bool got = s.entails(ctx, hyps, goal);
      bool want = oracle_entails(shapes, hyps, goal);
      REQUIRE(got == want);
    }
}

TEST_CASE("cube equality under hypotheses") {
  Solver s;
  TriContext c2 = interval_ctx(2);
  CubeTermPtr x = pos_var(2, 0), y = pos_var(2, 1);
  CHECK(s.cube_equal(c2, CubeTerm::proj(1, CubeTerm::pair(x, y)), x));
  CHECK_FALSE(s.cube_equal(c2, x, y));

  TriContext under = c2.extended_tope(Tope::eq(CubeTerm::var(1), CubeTerm::var(0)));
  CHECK(s.cube_equal(under, CubeTerm::var(1), CubeTerm::var(0)));

  // Inconsistent hypotheses identify everything.
  TriContext bot = c2.extended_tope(Tope::bot());
  CHECK(s.cube_equal(bot, x, y));

  // Pairs compare componentwise.
  TriContext cp = TriContext().extended_cube("p", CubeShape::power(2));
  CubeTermPtr pv = CubeTerm::var(0);
  CHECK(s.cube_equal(cp, pv, CubeTerm::pair(CubeTerm::proj(1, pv), CubeTerm::proj(2, pv))));
}
