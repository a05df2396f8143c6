#pragma once

// Shape vocabulary: simplices, boundaries, inner horns, products, and the
// gluing / restriction / join / pushout-join calculus. Constructors emit
// tope syntax; equality of shapes is always mutual entailment under the
// ambient cube, never syntactic, because the calculus produces logically
// equal but syntactically different presentations.

#include <string>

#include "stt/solver.hpp"
#include "stt/syntax.hpp"

namespace stt {

// A cube together with a tope over the singleton context binding one
// variable of that cube (de Bruijn index 0).
struct Shape {
  CubeShapePtr cube;
  TopePtr tope;
};

// Singleton context binding the shape's cube variable.
TriContext shape_context(const Shape& s, const std::string& name = "t");

// sub.tope entails sup.tope under the common cube. Cubes must agree.
bool shape_included(Solver& solver, const Shape& sub, const Shape& sup);
// Mutual entailment.
bool shapes_equal(Solver& solver, const Shape& a, const Shape& b);

// The n-simplex: the chain tope t_n <= ... <= t_1 over the n-cube.
// n = 0 is the point over the unit cube. Bounded at 8 to keep solver
// branch counts tractable.
Shape simplex(int n);

// Simplex boundaries for 1 <= n <= 3, written as one disjunct per face.
Shape boundary(int n);

// Inner horns: (2,1), (3,1), (3,2). horn(n,k) drops the face opposite
// vertex k from boundary(n).
Shape horn(int n, int k);

// The diagonal 1-face of the square, and its endpoints.
Shape diagonal();
Shape diagonal_boundary();

// Pointwise combinations. product reindexes both topes into the product
// cube; union and intersection require equal cubes.
Shape shape_product(const Shape& a, const Shape& b);
Shape shape_union(const Shape& a, const Shape& b);
Shape shape_intersection(const Shape& a, const Shape& b);

// A shape in the (1+n+1)-cube regarded as its restriction in the n-cube
// with the ambient presentation kept as extra data.
// Invariant: restriction.tope is ambient.tope with 1 substituted for the
// first coordinate and 0 for the last.
struct AugmentedShape {
  Shape ambient;
  Shape restriction;
};

// Substitutes 1 for the first interval leaf and 0 for the last, dropping
// both coordinates. The cube must consist of at least two interval
// leaves and nothing else; ArityMismatch otherwise.
Shape restriction(const Shape& ambient);

// Packages a shape with its restriction. Same preconditions.
AugmentedShape augmented(Shape ambient);

// Gluing of two shapes in (1+n+1)- and (1+m+1)-cubes: identifies the last
// coordinate of `a` with the first of `b` in the (1+n+1+m+1)-cube.
Shape gluing(const Shape& a, const Shape& b);

// Join: the restriction of the gluing of the ambient presentations.
AugmentedShape join(const AugmentedShape& a, const AugmentedShape& b);

// Pushout join of inclusions a ⊆ b and c ⊆ d: (a ⋆ d) ∪ (b ⋆ c), an
// augmented subshape of b ⋆ d. Ambient cubes of each inclusion must
// agree; ArityMismatch otherwise.
AugmentedShape pushout_join(const AugmentedShape& a, const AugmentedShape& b,
                            const AugmentedShape& c, const AugmentedShape& d);

// Canonical augmentation of the n-simplex: the (n+2)-simplex restricts to
// the n-simplex.
AugmentedShape simplex_augmented(int n);

// Augmented simplex boundaries, built recursively by pushout joins over
// the base spheres in dimensions 0 and 1. The ambient presentation lives
// in the (n+2)-cube, so n is bounded at 6.
AugmentedShape boundary_augmented(int n);

}  // namespace stt
