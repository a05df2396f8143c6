#pragma once

// Brute-force reference decision procedure for tope entailment. Kept
// deliberately independent of the solver: no union-find, no saturation,
// no branch representation. It enumerates every assignment of the
// interval leaves of the cube context to the chain 0 < 1 < ... < k+1
// (0 bottom, k+1 top, so endpoint and distinctness axioms hold by
// construction; k leaves realize every weak total order) and evaluates
// hypotheses and goal classically.
//
// Feasible only for small contexts; intended for cross-checks.

#include <string>
#include <utility>
#include <vector>

#include "stt/syntax.hpp"

namespace stt {

// De Bruijn index i in the topes refers to cube_ctx[size-1-i].
bool oracle_entails(const std::vector<CubeShapePtr>& cube_ctx,
                    const std::vector<TopePtr>& hyps, const TopePtr& goal);

}  // namespace stt
