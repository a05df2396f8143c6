#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <functional>
#include <string>
#include <vector>

#include "doctest.h"
#include "stt/checker.hpp"
#include "stt/shape.hpp"
#include "stt/solver.hpp"
#include "stt/syntax.hpp"

using namespace stt;

namespace {

DiagCode thrown(const std::function<void()>& f) {
  try {
    f();
  } catch (const CheckError& e) {
    return e.diag.code;
  }
  FAIL("expected a CheckError");
  return DiagCode::SyntaxError;
}

// Arrow type in a base type `a`: extension of the interval fixing both ends.
ExprPtr arrow(ExprPtr a, ExprPtr from, ExprPtr to) {
  TopePtr at0 = Tope::eq(CubeTerm::zero(), CubeTerm::var(0));
  TopePtr at1 = Tope::eq(CubeTerm::var(0), CubeTerm::one());
  return mk::ext("t", {}, CubeShape::interval(), Tope::top(), Tope::disj(at0, at1),
                 std::move(a), mk::rec_or(at0, at1, std::move(from), std::move(to)));
}

// Unconstrained map out of the interval.
ExprPtr interval_map(ExprPtr a) {
  return mk::ext("t", {}, CubeShape::interval(), Tope::top(), Tope::bot(), std::move(a),
                 mk::rec_bot());
}

struct World {
  Environment env;
  Solver solver;

  World() {
    post("A", mk::universe());
    post("B", mk::universe());
    post("x", mk::cnst("A"));
    post("y", mk::cnst("A"));
    post("z", mk::cnst("A"));
  }

  void post(const std::string& n, ExprPtr t) {
    Declaration d;
    d.kind = Declaration::Kind::Postulate;
    d.name = n;
    d.type = std::move(t);
    check_declaration(env, solver, std::move(d));
  }

  void define(const std::string& n, ExprPtr t, ExprPtr b) {
    Declaration d;
    d.kind = Declaration::Kind::Definition;
    d.name = n;
    d.type = std::move(t);
    d.body = std::move(b);
    check_declaration(env, solver, std::move(d));
  }

  Checker ck() { return Checker(env, solver); }
};

ExprPtr c(const std::string& n) { return mk::cnst(n); }

}  // namespace

TEST_CASE("arrows and their endpoints") {
  World w;
  Checker ck = w.ck();
  TriContext ctx;

  ExprPtr homxy = arrow(c("A"), c("x"), c("y"));
  ck.check_type(ctx, homxy);
  w.post("f", homxy);

  SUBCASE("constant lambda gives the identity arrow") {
    ck.check(ctx, mk::lam("t", {}, c("x")), arrow(c("A"), c("x"), c("x")));
  }
  SUBCASE("wrong endpoint is a boundary mismatch") {
    CHECK(thrown([&] {
            ck.check(ctx, mk::lam("t", {}, c("y")), arrow(c("A"), c("x"), c("x")));
          }) == DiagCode::BoundaryMismatch);
  }
  SUBCASE("application at the endpoints collapses to the boundary") {
    ExprPtr f0 = mk::ext_app(c("f"), CubeTerm::zero());
    ExprPtr f1 = mk::ext_app(c("f"), CubeTerm::one());
    CHECK(ck.def_equal(ctx, f0, c("x"), c("A")));
    CHECK(ck.def_equal(ctx, f1, c("y"), c("A")));
    CHECK_FALSE(ck.def_equal(ctx, f0, c("y"), c("A")));
  }
  SUBCASE("interior application stays neutral") {
    TriContext in = ctx.extended_cube("t", CubeShape::interval());
    ExprPtr ft = mk::ext_app(c("f"), CubeTerm::var(0));
    CHECK(ck.def_equal(in, ft, ft, c("A")));
    CHECK_FALSE(ck.def_equal(in, ft, c("x"), c("A")));
  }
  SUBCASE("plain application with a cube argument elaborates") {
    TriContext in = ctx.extended_cube("t", CubeShape::interval());
    ExprPtr ft = mk::app(c("f"), mk::var(0));
    ExprPtr ft2 = mk::ext_app(c("f"), CubeTerm::var(0));
    CHECK(alpha_equal(*ck.infer(in, ft), *c("A")));
    CHECK(ck.def_equal(in, ft, ft2, c("A")));
  }
}

TEST_CASE("rec-or computation and agreement") {
  World w;
  Checker ck = w.ck();
  TopePtr at0 = Tope::eq(CubeTerm::zero(), CubeTerm::var(0));
  TopePtr at1 = Tope::eq(CubeTerm::var(0), CubeTerm::one());
  TriContext ctx = TriContext().extended_cube("t", CubeShape::interval());
  TriContext cov = ctx.extended_tope(Tope::disj(at0, at1));

  SUBCASE("guards must cover the tope context") {
    ExprPtr r = mk::rec_or(at0, at1, c("x"), c("y"));
    CHECK(thrown([&] { ck.check(ctx, r, c("A")); }) ==
          DiagCode::TopeSideConditionFailed);
    ck.check(cov, r, c("A"));
  }
  SUBCASE("branches must agree on the overlap") {
    TopePtr low = Tope::leq(CubeTerm::var(0), CubeTerm::one());
    TopePtr high = Tope::leq(CubeTerm::zero(), CubeTerm::var(0));
    ExprPtr bad = mk::rec_or(low, high, c("x"), c("y"));
    CHECK(thrown([&] { ck.check(ctx, bad, c("A")); }) == DiagCode::BoundaryMismatch);
    ExprPtr good = mk::rec_or(low, high, c("x"), c("x"));
    ck.check(ctx, good, c("A"));
  }
  SUBCASE("equal branches collapse") {
    ExprPtr r = mk::rec_or(at0, at1, c("x"), c("x"));
    CHECK(ck.def_equal(cov, r, c("x"), c("A")));
  }
  SUBCASE("a stuck rec-or is compared branchwise") {
    ExprPtr r = mk::rec_or(at0, at1, c("x"), c("y"));
    CHECK(ck.def_equal(cov, r, r, c("A")));
    CHECK_FALSE(ck.def_equal(cov, r, c("x"), c("A")));
    TriContext left = cov.extended_tope(at0);
    CHECK(ck.def_equal(left, r, c("x"), c("A")));
  }
  SUBCASE("recBOT needs an inconsistent context") {
    CHECK(thrown([&] { ck.check(ctx, mk::rec_bot(), c("A")); }) ==
          DiagCode::TopeSideConditionFailed);
    ck.check(ctx.extended_tope(Tope::bot()), mk::rec_bot(), c("A"));
  }
  SUBCASE("everything is equal under an inconsistent context") {
    TriContext dead = ctx.extended_tope(Tope::bot());
    CHECK(ck.def_equal(dead, c("x"), c("y"), c("A")));
    CHECK(ck.def_equal(dead, c("A"), c("B"), mk::universe()));
  }
}

TEST_CASE("tope equations act on cube arguments") {
  World w;
  Checker ck = w.ck();
  w.post("g", interval_map(c("A")));
  TriContext ctx = TriContext().extended_cube("p", CubeShape::power(2));
  CubeTermPtr p1 = CubeTerm::proj(1, CubeTerm::var(0));
  CubeTermPtr p2 = CubeTerm::proj(2, CubeTerm::var(0));
  ExprPtr g1 = mk::ext_app(c("g"), p1);
  ExprPtr g2 = mk::ext_app(c("g"), p2);

  CHECK_FALSE(ck.def_equal(ctx, g1, g2, c("A")));
  TriContext eqc = ctx.extended_tope(Tope::eq(p1, p2));
  CHECK(ck.def_equal(eqc, g1, g2, c("A")));
  TriContext anti =
      ctx.extended_tope(Tope::leq(p1, p2)).extended_tope(Tope::leq(p2, p1));
  CHECK(ck.def_equal(anti, g1, g2, c("A")));
}

TEST_CASE("eta laws") {
  World w;
  Checker ck = w.ck();
  TriContext ctx;
  ExprPtr piAA = mk::pi("a", c("A"), c("A"));
  w.post("h", piAA);
  w.post("g", interval_map(c("A")));

  SUBCASE("functions") {
    ExprPtr eta = mk::lam("a", mk::app(c("h"), mk::var(0)));
    CHECK(ck.def_equal(ctx, eta, c("h"), piAA));
  }
  SUBCASE("extension maps") {
    ExprPtr eta = mk::lam("t", {}, mk::ext_app(c("g"), CubeTerm::var(0)));
    CHECK(ck.def_equal(ctx, eta, c("g"), interval_map(c("A"))));
  }
  SUBCASE("pairs") {
    ExprPtr sg = mk::sigma("a", c("A"), c("B"));
    ck.check_type(ctx, sg);
    w.post("pr", sg);
    ExprPtr eta = mk::pair(mk::fst(c("pr")), mk::snd(c("pr")));
    CHECK(ck.def_equal(ctx, eta, c("pr"), sg));
    CHECK(ck.def_equal(ctx, mk::fst(mk::pair(c("x"), c("y"))), c("x"), c("A")));
  }
}

TEST_CASE("identity types and the eliminator") {
  World w;
  Checker ck = w.ck();
  TriContext ctx;
  ExprPtr idxx = mk::id(c("A"), c("x"), c("x"));

  SUBCASE("refl wants equal endpoints") {
    ck.check(ctx, mk::refl(), idxx);
    CHECK(thrown([&] { ck.check(ctx, mk::refl(), mk::id(c("A"), c("x"), c("y"))); }) ==
          DiagCode::TypeMismatch);
  }

  ExprPtr motive = mk::lam("y", mk::lam("p", c("B")));
  w.post("d", c("B"));
  w.post("q", mk::id(c("A"), c("x"), c("y")));
  auto jspine = [&](ExprPtr b, ExprPtr p) {
    ExprPtr r = mk::jelim();
    for (const ExprPtr& a : {c("A"), c("x"), motive, c("d"), b, p}) r = mk::app(r, a);
    return r;
  };

  SUBCASE("J computes on refl") {
    ExprPtr onrefl = jspine(c("x"), mk::refl());
    CHECK(alpha_equal(*ck.whnf(ctx, ck.infer(ctx, onrefl)), *c("B")));
    CHECK(ck.def_equal(ctx, onrefl, c("d"), c("B")));
  }
  SUBCASE("J is stuck on a postulated path") {
    ExprPtr stuck = jspine(c("y"), c("q"));
    CHECK(alpha_equal(*ck.whnf(ctx, ck.infer(ctx, stuck)), *c("B")));
    CHECK(ck.def_equal(ctx, stuck, stuck, c("B")));
    CHECK_FALSE(ck.def_equal(ctx, stuck, c("d"), c("B")));
  }
}

TEST_CASE("ill-formed terms are rejected with the right code") {
  World w;
  Checker ck = w.ck();
  TriContext ctx;

  CHECK(thrown([&] { ck.infer(ctx, mk::universe()); }) == DiagCode::UniverseInUniverse);
  CHECK(thrown([&] { ck.check(ctx, mk::universe(), mk::universe()); }) ==
        DiagCode::UniverseInUniverse);
  CHECK(thrown([&] { ck.infer(ctx, mk::app(c("x"), c("y"))); }) ==
        DiagCode::NotAFunction);
  CHECK(thrown([&] { ck.infer(ctx, mk::fst(c("x"))); }) == DiagCode::TypeMismatch);
  CHECK(thrown([&] { ck.infer(ctx, mk::lam("a", mk::var(0))); }) ==
        DiagCode::NotInferable);
  CHECK(thrown([&] { ck.infer(ctx, c("missing")); }) == DiagCode::UnboundVariable);
  CHECK(thrown([&] { ck.check(ctx, c("y"), c("B")); }) == DiagCode::TypeMismatch);
  CHECK(thrown([&] { ck.check(ctx, mk::lam("a", mk::var(0)), c("A")); }) ==
        DiagCode::NotAFunction);

  SUBCASE("extension topes see only their own variable") {
    TopePtr leak = Tope::eq(CubeTerm::var(1), CubeTerm::var(0));
    ExprPtr bad = mk::ext("t", {}, CubeShape::interval(), leak, Tope::bot(), c("A"),
                          mk::rec_bot());
    TriContext in = TriContext().extended_cube("s", CubeShape::interval());
    CHECK(thrown([&] { ck.check_type(in, bad); }) == DiagCode::IllFormedTope);
  }
  SUBCASE("the boundary tope must refine the domain tope") {
    TopePtr at0 = Tope::eq(CubeTerm::zero(), CubeTerm::var(0));
    ExprPtr bad =
        mk::ext("t", {}, CubeShape::interval(), at0, Tope::top(), c("A"), c("x"));
    CHECK(thrown([&] { ck.check_type(ctx, bad); }) ==
          DiagCode::TopeSideConditionFailed);
  }
  SUBCASE("applications outside the domain shape are rejected") {
    TopePtr ends = Tope::disj(Tope::eq(CubeTerm::zero(), CubeTerm::var(0)),
                              Tope::eq(CubeTerm::var(0), CubeTerm::one()));
    w.post("e", mk::ext("t", {}, CubeShape::interval(), ends, Tope::bot(), c("A"),
                        mk::rec_bot()));
    TriContext in = TriContext().extended_cube("t", CubeShape::interval());
    ExprPtr use = mk::ext_app(c("e"), CubeTerm::var(0));
    CHECK(thrown([&] { ck.infer(in, use); }) == DiagCode::TopeSideConditionFailed);
    ExprPtr ty = ck.infer(
        in.extended_tope(Tope::eq(CubeTerm::zero(), CubeTerm::var(0))), use);
    CHECK(alpha_equal(*ty, *c("A")));
  }
  SUBCASE("declarations reject duplicate names") {
    CHECK(thrown([&] { w.post("x", c("A")); }) == DiagCode::DuplicateName);
  }
  SUBCASE("declaration errors carry the file") {
    Declaration d;
    d.kind = Declaration::Kind::Definition;
    d.name = "broken";
    d.type = c("A");
    d.body = c("B");
    d.file = "here.stt";
    d.span = Span{3, 1, 6};
    try {
      check_declaration(w.env, w.solver, std::move(d));
      FAIL("expected a CheckError");
    } catch (const CheckError& e) {
      CHECK(e.diag.code == DiagCode::TypeMismatch);
      CHECK(e.diag.file == "here.stt");
      CHECK(e.diag.span.known());
    }
  }
}

TEST_CASE("triangles over the 2-simplex") {
  World w;
  Checker ck = w.ck();
  TriContext ctx;
  w.post("f", arrow(c("A"), c("x"), c("y")));
  w.post("g", arrow(c("A"), c("y"), c("z")));
  w.post("h", arrow(c("A"), c("x"), c("z")));

  CubeShapePtr sq = CubeShape::power(2);
  CubeTermPtr l0 = leaf_term(*sq, 0);  // t1
  CubeTermPtr l1 = leaf_term(*sq, 1);  // t2
  TopePtr psi = Tope::leq(l1, l0);
  TopePtr bottom = Tope::eq(CubeTerm::zero(), l1);
  TopePtr diag = Tope::eq(l1, l0);
  TopePtr right = Tope::eq(l0, CubeTerm::one());
  TopePtr phi = Tope::disj(bottom, Tope::disj(diag, right));

  auto triangle = [&](ExprPtr fe, ExprPtr ge, ExprPtr he) {
    ExprPtr section =
        mk::rec_or(bottom, Tope::disj(diag, right), mk::ext_app(std::move(fe), l0),
                   mk::rec_or(diag, right, mk::ext_app(std::move(he), l0),
                              mk::ext_app(std::move(ge), l1)));
    return mk::ext("t", {"t1", "t2"}, sq, psi, phi, c("A"), std::move(section));
  };

  ExprPtr tri = triangle(c("f"), c("g"), c("h"));
  ck.check_type(ctx, tri);
  w.post("comp", tri);

  SUBCASE("restricting a triangle to an edge gives the edge") {
    TriContext in = ctx.extended_cube("s", CubeShape::interval());
    CubeTermPtr t = CubeTerm::var(0);
    ExprPtr on_bottom = mk::ext_app(c("comp"), CubeTerm::pair(t, CubeTerm::zero()));
    CHECK(ck.def_equal(in, on_bottom, mk::ext_app(c("f"), t), c("A")));
    ExprPtr on_diag = mk::ext_app(c("comp"), CubeTerm::pair(t, t));
    CHECK(ck.def_equal(in, on_diag, mk::ext_app(c("h"), t), c("A")));
    ExprPtr on_right = mk::ext_app(c("comp"), CubeTerm::pair(CubeTerm::one(), t));
    CHECK(ck.def_equal(in, on_right, mk::ext_app(c("g"), t), c("A")));
  }
  SUBCASE("corners agree with the endpoints") {
    ExprPtr origin =
        mk::ext_app(c("comp"), CubeTerm::pair(CubeTerm::zero(), CubeTerm::zero()));
    CHECK(ck.def_equal(ctx, origin, c("x"), c("A")));
    ExprPtr far =
        mk::ext_app(c("comp"), CubeTerm::pair(CubeTerm::one(), CubeTerm::one()));
    CHECK(ck.def_equal(ctx, far, c("z"), c("A")));
  }
  SUBCASE("a degenerate triangle witnesses the identity law") {
    w.define("idy", arrow(c("A"), c("y"), c("y")), mk::lam("t", {}, c("y")));
    ExprPtr degen =
        mk::lam("t", {"t1", "t2"},
                mk::ext_app(c("f"), CubeTerm::proj(1, CubeTerm::var(0))));
    ck.check(ctx, degen, triangle(c("f"), c("idy"), c("f")));
  }
  SUBCASE("mismatched edges fail the boundary obligation") {
    ExprPtr degen =
        mk::lam("t", {"t1", "t2"},
                mk::ext_app(c("f"), CubeTerm::proj(1, CubeTerm::var(0))));
    CHECK(thrown([&] { ck.check(ctx, degen, triangle(c("f"), c("g"), c("f"))); }) ==
          DiagCode::BoundaryMismatch);
  }
}

TEST_CASE("connection squares") {
  World w;
  Checker ck = w.ck();
  TriContext ctx;
  w.post("f", arrow(c("A"), c("x"), c("y")));

  CubeShapePtr sq = CubeShape::power(2);
  CubeTermPtr l0 = leaf_term(*sq, 0);
  CubeTermPtr l1 = leaf_term(*sq, 1);
  ExprPtr square = mk::ext("p", {"t", "s"}, sq, Tope::top(), Tope::bot(), c("A"),
                           mk::rec_bot());
  // max connection: on t <= s use f(s), on s <= t use f(t).
  ExprPtr body = mk::rec_or(Tope::leq(l0, l1), Tope::leq(l1, l0),
                            mk::ext_app(c("f"), l1), mk::ext_app(c("f"), l0));
  w.define("vee", square, mk::lam("p", {"t", "s"}, body));

  TriContext in = ctx.extended_cube("u", CubeShape::interval());
  CubeTermPtr u = CubeTerm::var(0);
  auto at = [&](CubeTermPtr a, CubeTermPtr b) {
    return mk::ext_app(c("vee"), CubeTerm::pair(std::move(a), std::move(b)));
  };
  ExprPtr fu = mk::ext_app(c("f"), u);

  CHECK(ck.def_equal(in, at(CubeTerm::zero(), u), fu, c("A")));
  CHECK(ck.def_equal(in, at(u, CubeTerm::zero()), fu, c("A")));
  CHECK(ck.def_equal(in, at(CubeTerm::one(), u), c("y"), c("A")));
  CHECK(ck.def_equal(in, at(u, CubeTerm::one()), c("y"), c("A")));
  CHECK(ck.def_equal(in, at(u, u), fu, c("A")));
}

TEST_CASE("normalization") {
  World w;
  Checker ck = w.ck();
  TriContext ctx;
  ExprPtr homxy = arrow(c("A"), c("x"), c("y"));
  w.post("f", homxy);
  ExprPtr piAA = mk::pi("a", c("A"), c("A"));
  w.post("h", piAA);

  SUBCASE("normal forms are eta-long") {
    ExprPtr nf = ck.normalize(ctx, c("h"), piAA);
    CHECK(alpha_equal(*nf, *mk::lam("a", mk::app(c("h"), mk::var(0)))));
    ExprPtr nf2 = ck.normalize(ctx, c("f"), homxy);
    CHECK(alpha_equal(*nf2,
                      *mk::lam("t", {}, mk::ext_app(c("f"), CubeTerm::var(0)))));
  }
  SUBCASE("normalization is idempotent and sound") {
    w.post("q", mk::id(c("A"), c("x"), c("y")));
    w.define("idA", piAA, mk::lam("a", mk::var(0)));
    std::vector<std::pair<ExprPtr, ExprPtr>> samples = {
        {c("x"), c("A")},
        {c("f"), homxy},
        {mk::app(c("idA"), c("x")), c("A")},
        {mk::lam("t", {}, mk::ext_app(c("f"), CubeTerm::var(0))), homxy},
        {mk::pair(c("x"), c("y")), mk::sigma("a", c("A"), c("A"))},
        {c("q"), mk::id(c("A"), c("x"), c("y"))},
        {mk::refl(), mk::id(c("A"), c("x"), c("x"))},
    };
    for (const auto& [e, t] : samples) {
      CAPTURE(render_tope(ctx, Tope::top()));
      ck.check(ctx, e, t);
      ExprPtr nf = ck.normalize(ctx, e, t);
      ck.check(ctx, nf, t);
      CHECK(ck.def_equal(ctx, e, nf, t));
      ExprPtr nf2 = ck.normalize(ctx, nf, t);
      CHECK(alpha_equal(*nf, *nf2));
    }
  }
  SUBCASE("stuck branching terms normalize branchwise") {
    TopePtr at0 = Tope::eq(CubeTerm::zero(), CubeTerm::var(0));
    TopePtr at1 = Tope::eq(CubeTerm::var(0), CubeTerm::one());
    TriContext cov = ctx.extended_cube("t", CubeShape::interval())
                         .extended_tope(Tope::disj(at0, at1));
    ExprPtr r = mk::rec_or(at0, at1, c("x"), mk::app(mk::lam("a", mk::var(0)), c("y")));
    ExprPtr nf = ck.normalize(cov, r, c("A"));
    CHECK(alpha_equal(*nf, *mk::rec_or(at0, at1, c("x"), c("y"))));
    ExprPtr nf2 = ck.normalize(cov, nf, c("A"));
    CHECK(alpha_equal(*nf, *nf2));
  }
  SUBCASE("definitional equality is an equivalence relation") {
    std::vector<ExprPtr> cls = {
        c("h"),
        mk::lam("a", mk::app(c("h"), mk::var(0))),
        ck.normalize(ctx, c("h"), piAA),
        mk::lam("b", mk::app(mk::lam("a", mk::var(0)), mk::app(c("h"), mk::var(0)))),
    };
    for (const auto& a : cls)
      for (const auto& b : cls) {
        CHECK(ck.def_equal(ctx, a, b, piAA));
        CHECK(ck.def_equal(ctx, b, a, piAA));
      }
    ExprPtr other = mk::lam("a", c("x"));
    for (const auto& a : cls) {
      CHECK_FALSE(ck.def_equal(ctx, a, other, piAA));
      CHECK_FALSE(ck.def_equal(ctx, other, a, piAA));
    }
  }
}

TEST_CASE("dependent pairs and type-level computation") {
  World w;
  Checker ck = w.ck();
  TriContext ctx;

  // P : A -> U, with a point of P x.
  w.post("P", mk::pi("a", c("A"), mk::universe()));
  w.post("px", mk::app(c("P"), c("x")));
  ExprPtr total = mk::sigma("a", c("A"), mk::app(c("P"), mk::var(0)));
  ck.check_type(ctx, total);

  ExprPtr point = mk::pair(c("x"), c("px"));
  ck.check(ctx, point, total);
  CHECK(thrown([&] { ck.check(ctx, mk::pair(c("y"), c("px")), total); }) ==
        DiagCode::TypeMismatch);

  // The second projection's classifier computes from the first.
  w.post("pt", total);
  ExprPtr snd_ty = ck.infer(ctx, mk::snd(c("pt")));
  CHECK(alpha_equal(*ck.whnf(ctx, snd_ty), *mk::app(c("P"), mk::fst(c("pt")))));
  CHECK(ck.def_equal(ctx, mk::snd(point), c("px"), mk::app(c("P"), c("x"))));
}
