#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "pbt/errors.hpp"
#include "pbt/syntax.hpp"
#include "pbt/terms.hpp"

namespace pbt {

// Step budget shared by one top-level search. Backchain steps, hypothesis
// matches (init), and axiom steps consume fuel; structural rules are free.
// `depth` tracks the live recursion nesting so a runaway search fails with
// FuelExhausted instead of exhausting the machine stack.
struct FuelBudget {
  long long remaining = 1'000'000;
  int depth = 0;
  int max_depth = 10'000;
  void spend();
};

// RAII depth accounting for one recursion frame of the search.
struct DepthGuard {
  FuelBudget* fuel;
  explicit DepthGuard(FuelBudget* f) : fuel(f) {
    if (fuel && ++fuel->depth > fuel->max_depth) {
      --fuel->depth;
      throw FuelExhausted("proof search exceeded the depth limit");
    }
  }
  ~DepthGuard() {
    if (fuel) --fuel->depth;
  }
  DepthGuard(const DepthGuard&) = delete;
  DepthGuard& operator=(const DepthGuard&) = delete;
};

struct EngineOpts {
  FuelBudget* fuel = nullptr;
};

// Intuitionistic hypotheses as a persistent list so continuations close
// over exactly the hypotheses in scope where they were captured.
struct HypNode {
  Term atom;
  std::shared_ptr<const HypNode> next;
};
using Hyps = std::shared_ptr<const HypNode>;

// Linear context with stable positions: entries are only ever appended or
// flipped Bnd -> Del in a copy.
enum class RKind { Del, Bnd, Ubnd };
struct ROpt {
  RKind kind;
  Term atom;
};
using Ctx = std::vector<ROpt>;

using Kont = std::function<bool()>;
using LKont = std::function<bool(const Ctx&)>;

// Depth-first, left-to-right proof search. The continuation returning true
// stops the search with all bindings in place; a false return backtracks
// and the store is restored. Hypotheses are tried (oldest first) before
// program clauses.
bool solve(Store& st, const Program& prog, const Hyps& hyps, const Goal& g,
           const EngineOpts& opts, const Kont& k);

// The linear variant: `in` is the context before the goal, the
// continuation receives the context after it. A `A -o G` antecedent must
// be consumed inside G; a `!G` must consume nothing.
bool ll_solve(Store& st, const Program& prog, const Ctx& in, const Goal& g,
              const EngineOpts& opts, const LKont& k);

// Mode dispatch with empty hypotheses/context.
bool prove(Store& st, const Program& prog, const Goal& g,
           const EngineOpts& opts, const Kont& k);

// Negation as finite failure: true when `g` has no proof within `fuel`
// steps. Throws NonGroundNegation unless g is ground, FuelExhausted when
// the search cannot be finished. Leaves no bindings behind.
bool naf(Store& st, const Program& prog, const Goal& g, long long fuel);

}  // namespace pbt
