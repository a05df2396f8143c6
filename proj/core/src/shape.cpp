#include "stt/shape.hpp"

#include <functional>
#include <vector>

namespace stt {

namespace {

int leaf_count(const CubeShape& c) { return static_cast<int>(interval_paths(c).size()); }

// True when the cube is built from interval leaves only (no unit factors).
bool all_interval(const CubeShape& c) {
  switch (c.tag) {
    case CubeShape::Tag::Unit:
      return false;
    case CubeShape::Tag::Interval:
      return true;
    case CubeShape::Tag::Product:
      return all_interval(*c.lhs) && all_interval(*c.rhs);
  }
  return false;
}

// Index of a root-to-leaf path among the interval leaves of a cube.
int leaf_index(const CubeShape& cube, const Path& p) {
  auto paths = interval_paths(cube);
  for (size_t i = 0; i < paths.size(); ++i)
    if (paths[i] == p) return static_cast<int>(i);
  fail(DiagCode::IllFormedCubeTerm, "projection path does not reach an interval leaf");
}

using LeafMap = std::function<CubeTermPtr(int)>;

// Rewrites a normal cube term over the shape's binder into a term over a
// new binder, sending interval leaf i to map(i). The term must be in
// normal form: Star, Pair of normals, Zero, One, or a projection chain
// ending in variable 0.
CubeTermPtr convert_term(const Shape& src, const CubeTermPtr& normal, const LeafMap& map) {
  switch (normal->tag) {
    case CubeTerm::Tag::Star:
      return CubeTerm::star();
    case CubeTerm::Tag::Zero:
      return CubeTerm::zero();
    case CubeTerm::Tag::One:
      return CubeTerm::one();
    case CubeTerm::Tag::Pair:
      return CubeTerm::pair(convert_term(src, normal->a, map),
                            convert_term(src, normal->b, map));
    case CubeTerm::Tag::Proj:
    case CubeTerm::Tag::Var: {
      Path path;
      const CubeTerm* cur = normal.get();
      while (cur->tag == CubeTerm::Tag::Proj) {
        path.push_back(cur->which);
        cur = cur->a.get();
      }
      if (cur->tag != CubeTerm::Tag::Var || cur->index != 0)
        fail(DiagCode::IllFormedTope, "shape tope mentions a foreign variable");
      std::reverse(path.begin(), path.end());
      return map(leaf_index(*src.cube, path));
    }
  }
  fail(DiagCode::IllFormedCubeTerm, "malformed cube term");
}

// Rewrites every atom of the shape's tope through the leaf map.
TopePtr rewrite_leaves(const Shape& src, const LeafMap& map) {
  TriContext ctx = shape_context(src);
  std::function<TopePtr(const TopePtr&)> go = [&](const TopePtr& t) -> TopePtr {
    switch (t->tag) {
      case Tope::Tag::Top:
      case Tope::Tag::Bot:
        return t;
      case Tope::Tag::And:
        return Tope::conj(go(t->l), go(t->r));
      case Tope::Tag::Or:
        return Tope::disj(go(t->l), go(t->r));
      case Tope::Tag::Eq:
        return Tope::eq(convert_term(src, normalize_cube(ctx, t->s), map),
                        convert_term(src, normalize_cube(ctx, t->t), map));
      case Tope::Tag::Leq:
        return Tope::leq(convert_term(src, normalize_cube(ctx, t->s), map),
                         convert_term(src, normalize_cube(ctx, t->t), map));
    }
    return t;
  };
  return go(src.tope);
}

// Requires an all-interval cube of at least two coordinates.
void require_glueable(const Shape& s, const char* role) {
  if (!all_interval(*s.cube) || leaf_count(*s.cube) < 2)
    fail(DiagCode::ArityMismatch,
         std::string(role) + " must be a shape in an interval cube of dimension at least 2");
}

}  // namespace

TriContext shape_context(const Shape& s, const std::string& name) {
  return TriContext().extended_cube(name, s.cube);
}

bool shape_included(Solver& solver, const Shape& sub, const Shape& sup) {
  if (!cube_shape_equal(*sub.cube, *sup.cube))
    fail(DiagCode::ArityMismatch, "shape inclusion requires a common cube");
  TriContext ctx = shape_context(sub);
  return solver.entails(ctx, {sub.tope}, sup.tope);
}

bool shapes_equal(Solver& solver, const Shape& a, const Shape& b) {
  return shape_included(solver, a, b) && shape_included(solver, b, a);
}

Shape simplex(int n) {
  if (n < 0) fail(DiagCode::OutOfRange, "negative simplex dimension");
  if (n > 8) fail(DiagCode::Overflow, "simplex dimension bounded at 8");
  CubeShapePtr cube = CubeShape::power(n);
  TopePtr tope = Tope::top();
  // Chain t_n <= ... <= t_1, leftmost comparison outermost.
  for (int i = 0; i <= n - 2; ++i) {
    TopePtr step = Tope::leq(leaf_term(*cube, i + 1), leaf_term(*cube, i));
    tope = (i == 0) ? step : Tope::conj(step, tope);
  }
  return Shape{cube, tope};
}

Shape boundary(int n) {
  if (n < 1 || n > 3) fail(DiagCode::OutOfRange, "boundary defined for dimensions 1 to 3");
  CubeShapePtr cube = CubeShape::power(n);
  auto t = [&](int i) { return leaf_term(*cube, i); };
  switch (n) {
    case 1:
      return Shape{cube, Tope::disj(Tope::eq(CubeTerm::zero(), t(0)),
                                    Tope::eq(t(0), CubeTerm::one()))};
    case 2:
      // (0 === t2 <= t1) \/ (t2 === t1) \/ (t2 <= t1 === 1)
      return Shape{
          cube,
          Tope::disj(Tope::conj(Tope::eq(CubeTerm::zero(), t(1)), Tope::leq(t(1), t(0))),
                     Tope::disj(Tope::eq(t(1), t(0)),
                                Tope::conj(Tope::leq(t(1), t(0)),
                                           Tope::eq(t(0), CubeTerm::one()))))};
    default: {
      // One disjunct per face of the 3-simplex.
      TopePtr chain23 = Tope::conj(Tope::leq(t(2), t(1)), Tope::leq(t(1), t(0)));
      TopePtr f3 = Tope::conj(Tope::eq(CubeTerm::zero(), t(2)), chain23);
      TopePtr f2 = Tope::conj(Tope::eq(t(2), t(1)), Tope::leq(t(1), t(0)));
      TopePtr f1 = Tope::conj(Tope::leq(t(2), t(1)), Tope::eq(t(1), t(0)));
      TopePtr f0 = Tope::conj(chain23, Tope::eq(t(0), CubeTerm::one()));
      return Shape{cube, Tope::disj(f3, Tope::disj(f2, Tope::disj(f1, f0)))};
    }
  }
}

Shape horn(int n, int k) {
  if (n < 2 || n > 3 || k <= 0 || k >= n)
    fail(DiagCode::OutOfRange, "inner horns are defined for (2,1), (3,1) and (3,2)");
  CubeShapePtr cube = CubeShape::power(n);
  auto t = [&](int i) { return leaf_term(*cube, i); };
  if (n == 2)
    return Shape{cube, Tope::disj(Tope::eq(t(1), CubeTerm::zero()),
                                  Tope::eq(t(0), CubeTerm::one()))};
  // Faces of the 3-simplex, minus the one opposite vertex k.
  TopePtr chain23 = Tope::conj(Tope::leq(t(2), t(1)), Tope::leq(t(1), t(0)));
  TopePtr f3 = Tope::conj(Tope::eq(CubeTerm::zero(), t(2)), chain23);
  TopePtr f2 = Tope::conj(Tope::eq(t(2), t(1)), Tope::leq(t(1), t(0)));
  TopePtr f1 = Tope::conj(Tope::leq(t(2), t(1)), Tope::eq(t(1), t(0)));
  TopePtr f0 = Tope::conj(chain23, Tope::eq(t(0), CubeTerm::one()));
  TopePtr kept = (k == 1) ? Tope::disj(f3, Tope::disj(f2, f0))
                          : Tope::disj(f3, Tope::disj(f1, f0));
  return Shape{cube, kept};
}

Shape diagonal() {
  CubeShapePtr cube = CubeShape::power(2);
  return Shape{cube, Tope::eq(leaf_term(*cube, 0), leaf_term(*cube, 1))};
}

Shape diagonal_boundary() {
  CubeShapePtr cube = CubeShape::power(2);
  auto t = [&](int i) { return leaf_term(*cube, i); };
  TopePtr both0 = Tope::conj(Tope::eq(t(0), CubeTerm::zero()), Tope::eq(t(1), CubeTerm::zero()));
  TopePtr both1 = Tope::conj(Tope::eq(t(0), CubeTerm::one()), Tope::eq(t(1), CubeTerm::one()));
  return Shape{cube, Tope::disj(both0, both1)};
}

Shape shape_product(const Shape& a, const Shape& b) {
  CubeShapePtr cube = CubeShape::product(a.cube, b.cube);
  int na = leaf_count(*a.cube);
  TopePtr pa = rewrite_leaves(a, [&](int i) { return leaf_term(*cube, i); });
  TopePtr pb = rewrite_leaves(b, [&](int j) { return leaf_term(*cube, na + j); });
  return Shape{cube, Tope::conj(pa, pb)};
}

Shape shape_union(const Shape& a, const Shape& b) {
  if (!cube_shape_equal(*a.cube, *b.cube))
    fail(DiagCode::ArityMismatch, "shape union requires a common cube");
  return Shape{a.cube, Tope::disj(a.tope, b.tope)};
}

Shape shape_intersection(const Shape& a, const Shape& b) {
  if (!cube_shape_equal(*a.cube, *b.cube))
    fail(DiagCode::ArityMismatch, "shape intersection requires a common cube");
  return Shape{a.cube, Tope::conj(a.tope, b.tope)};
}

Shape restriction(const Shape& ambient) {
  require_glueable(ambient, "restriction argument");
  int k = leaf_count(*ambient.cube);
  CubeShapePtr cube = CubeShape::power(k - 2);
  TopePtr tope = rewrite_leaves(ambient, [&](int i) -> CubeTermPtr {
    if (i == 0) return CubeTerm::one();
    if (i == k - 1) return CubeTerm::zero();
    return leaf_term(*cube, i - 1);
  });
  return Shape{cube, tope};
}

AugmentedShape augmented(Shape ambient) {
  Shape r = restriction(ambient);
  return AugmentedShape{std::move(ambient), std::move(r)};
}

Shape gluing(const Shape& a, const Shape& b) {
  require_glueable(a, "first gluing argument");
  require_glueable(b, "second gluing argument");
  int na = leaf_count(*a.cube);
  int nb = leaf_count(*b.cube);
  CubeShapePtr cube = CubeShape::power(na + nb - 1);
  // The last coordinate of `a` and the first of `b` both land on the
  // shared coordinate u at position na - 1.
  TopePtr pa = rewrite_leaves(a, [&](int i) { return leaf_term(*cube, i); });
  TopePtr pb = rewrite_leaves(b, [&](int j) { return leaf_term(*cube, na - 1 + j); });
  return Shape{cube, Tope::conj(pa, pb)};
}

AugmentedShape join(const AugmentedShape& a, const AugmentedShape& b) {
  return augmented(gluing(a.ambient, b.ambient));
}

AugmentedShape pushout_join(const AugmentedShape& a, const AugmentedShape& b,
                            const AugmentedShape& c, const AugmentedShape& d) {
  if (!cube_shape_equal(*a.ambient.cube, *b.ambient.cube) ||
      !cube_shape_equal(*c.ambient.cube, *d.ambient.cube))
    fail(DiagCode::ArityMismatch, "pushout join requires inclusions over common cubes");
  Shape ad = gluing(a.ambient, d.ambient);
  Shape bc = gluing(b.ambient, c.ambient);
  return augmented(shape_union(ad, bc));
}

AugmentedShape simplex_augmented(int n) { return augmented(simplex(n + 2)); }

AugmentedShape boundary_augmented(int n) {
  if (n < 0) fail(DiagCode::OutOfRange, "negative boundary dimension");
  if (n > 6) fail(DiagCode::Overflow, "augmented boundary dimension bounded at 6");
  CubeShapePtr c2 = CubeShape::power(2);
  if (n == 0)
    return augmented(Shape{c2, Tope::eq(leaf_term(*c2, 1), leaf_term(*c2, 0))});
  if (n == 1) {
    CubeShapePtr c3 = CubeShape::power(3);
    auto t = [&](int i) { return leaf_term(*c3, i); };
    // (t+ === t1 <= t-) \/ (t+ <= t1 === t-)
    TopePtr left = Tope::conj(Tope::eq(t(2), t(1)), Tope::leq(t(1), t(0)));
    TopePtr right = Tope::conj(Tope::leq(t(2), t(1)), Tope::eq(t(1), t(0)));
    return augmented(Shape{c3, Tope::disj(left, right)});
  }
  return pushout_join(boundary_augmented(n - 1), simplex_augmented(n - 1),
                      boundary_augmented(0), simplex_augmented(0));
}

}  // namespace stt
