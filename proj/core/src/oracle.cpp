#include "stt/oracle.hpp"

#include <functional>

namespace stt {

namespace {

// Evaluated cube term: an int per interval leaf, structured like the cube.
struct Value {
  enum class K { Interval, Unit, Pair } k = K::Unit;
  int iv = 0;
  std::vector<Value> parts;  // Pair: exactly two
};

struct Eval {
  const std::vector<CubeShapePtr>& ctx;  // outermost first
  // Leaf values per binder, aligned with interval_paths of its shape.
  const std::vector<std::vector<int>>& leaves;

  Value build(const CubeShape& sh, const std::vector<int>& vals, size_t& next) const {
    Value v;
    switch (sh.tag) {
      case CubeShape::Tag::Unit:
        v.k = Value::K::Unit;
        return v;
      case CubeShape::Tag::Interval:
        v.k = Value::K::Interval;
        v.iv = vals[next++];
        return v;
      case CubeShape::Tag::Product:
        v.k = Value::K::Pair;
        v.parts.push_back(build(*sh.lhs, vals, next));
        v.parts.push_back(build(*sh.rhs, vals, next));
        return v;
    }
    return v;
  }

  Value term(const CubeTerm& t, int top) const {
    switch (t.tag) {
      case CubeTerm::Tag::Var: {
        size_t pos = ctx.size() - 1 - static_cast<size_t>(t.index);
        size_t next = 0;
        return build(*ctx[pos], leaves[pos], next);
      }
      case CubeTerm::Tag::Star:
        return Value{};
      case CubeTerm::Tag::Zero: {
        Value v;
        v.k = Value::K::Interval;
        v.iv = 0;
        return v;
      }
      case CubeTerm::Tag::One: {
        Value v;
        v.k = Value::K::Interval;
        v.iv = top;
        return v;
      }
      case CubeTerm::Tag::Pair: {
        Value v;
        v.k = Value::K::Pair;
        v.parts.push_back(term(*t.a, top));
        v.parts.push_back(term(*t.b, top));
        return v;
      }
      case CubeTerm::Tag::Proj: {
        Value of = term(*t.a, top);
        return of.parts[t.which == 1 ? 0 : 1];
      }
    }
    return Value{};
  }
};

bool value_equal(const Value& a, const Value& b) {
  if (a.k != b.k) return false;
  switch (a.k) {
    case Value::K::Unit:
      return true;
    case Value::K::Interval:
      return a.iv == b.iv;
    case Value::K::Pair:
      return value_equal(a.parts[0], b.parts[0]) && value_equal(a.parts[1], b.parts[1]);
  }
  return false;
}

bool eval_tope(const Tope& t, const Eval& ev, int top) {
  switch (t.tag) {
    case Tope::Tag::Top:
      return true;
    case Tope::Tag::Bot:
      return false;
    case Tope::Tag::And:
      return eval_tope(*t.l, ev, top) && eval_tope(*t.r, ev, top);
    case Tope::Tag::Or:
      return eval_tope(*t.l, ev, top) || eval_tope(*t.r, ev, top);
    case Tope::Tag::Eq:
      return value_equal(ev.term(*t.s, top), ev.term(*t.t, top));
    case Tope::Tag::Leq:
      return ev.term(*t.s, top).iv <= ev.term(*t.t, top).iv;
  }
  return false;
}

}  // namespace

bool oracle_entails(const std::vector<CubeShapePtr>& cube_ctx,
                    const std::vector<TopePtr>& hyps, const TopePtr& goal) {
  std::vector<std::vector<int>> leaves(cube_ctx.size());
  int total = 0;
  for (size_t i = 0; i < cube_ctx.size(); ++i) {
    leaves[i].resize(interval_paths(*cube_ctx[i]).size(), 0);
    total += static_cast<int>(leaves[i].size());
  }
  const int top = total + 1;  // chain 0..top; 1 evaluates to top
  Eval ev{cube_ctx, leaves};

  std::function<bool(size_t, size_t)> walk = [&](size_t bi, size_t li) -> bool {
    if (bi == cube_ctx.size()) {
      for (const auto& h : hyps)
        if (!eval_tope(*h, ev, top)) return true;  // hypothesis fails: vacuous
      return eval_tope(*goal, ev, top);
    }
    if (li == leaves[bi].size()) return walk(bi + 1, 0);
    for (int v = 0; v <= top; ++v) {
      leaves[bi][li] = v;
      if (!walk(bi, li + 1)) return false;
    }
    return true;
  };
  return walk(0, 0);
}

}  // namespace stt
