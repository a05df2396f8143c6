#pragma once

// Shared test utilities: small contexts and seeded random generators for
// cube terms and topes. Deterministic across runs and platforms.

#include <random>
#include <string>
#include <vector>

#include "stt/syntax.hpp"

namespace stt::test {

// Context of n interval binders named x, y, z, w, ...
inline TriContext interval_ctx(int n) {
  static const char* names[] = {"x", "y", "z", "w", "u", "v"};
  TriContext ctx;
  for (int i = 0; i < n; ++i)
    ctx = ctx.extended_cube(i < 6 ? names[i] : "x" + std::to_string(i),
                            CubeShape::interval());
  return ctx;
}

// Variable by binding position (0 = outermost) in a context of n binders.
inline CubeTermPtr pos_var(int n, int position) {
  return CubeTerm::var(n - 1 - position);
}

class Gen {
 public:
  Gen(uint32_t seed, int nvars) : rng_(seed), nvars_(nvars) {}

  int below(int n) { return static_cast<int>(rng_() % static_cast<uint32_t>(n)); }
  bool flip() { return below(2) == 0; }

  // An interval term over the context: a variable or an endpoint.
  CubeTermPtr interval_term() {
    int r = below(nvars_ + 2);
    if (r == 0) return CubeTerm::zero();
    if (r == 1) return CubeTerm::one();
    return CubeTerm::var(r - 2);
  }

  TopePtr atom() {
    CubeTermPtr s = interval_term();
    CubeTermPtr t = interval_term();
    return flip() ? Tope::eq(s, t) : Tope::leq(s, t);
  }

  TopePtr tope(int depth) {
    if (depth == 0) {
      int r = below(8);
      if (r == 6) return Tope::top();
      if (r == 7) return Tope::bot();
      return atom();
    }
    int r = below(4);
    if (r == 0) return Tope::conj(tope(depth - 1), tope(depth - 1));
    if (r == 1) return Tope::disj(tope(depth - 1), tope(depth - 1));
    return atom();
  }

  // Conjunction-free list of random atoms.
  std::vector<TopePtr> hyps(int count) {
    std::vector<TopePtr> out;
    for (int i = 0; i < count; ++i) out.push_back(atom());
    return out;
  }

  std::mt19937& rng() { return rng_; }
  int nvars() const { return nvars_; }

 private:
  std::mt19937 rng_;
  int nvars_;
};

}  // namespace stt::test
