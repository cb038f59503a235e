#pragma once

#include <functional>

#include "pbt/engine.hpp"
#include "pbt/syntax.hpp"
#include "pbt/terms.hpp"

namespace pbt {

// Certificate-directed proof checking. The kernel walks the same search
// space as the engine, but every inference rule first consults a callback
// bundle (clerks for invertible rules, experts for choice rules). Each
// callback receives the current certificate term and a continuation it may
// invoke zero or more times with continuation certificates; invoking it
// several times expresses certificate-directed choice (e.g. trying both
// disjuncts, or enumerating witnesses). A callback that binds store state
// must bracket the continuation with mark/undo itself.
struct Fpc {
  // tt, eq, init: leaf-ish rules, continuation takes no certificate. For
  // init the continuation performs the whole hypothesis/context scan (and
  // axiom step), so the expert is consulted once per atomic goal.
  std::function<bool(Store&, const Term& cert, const Kont& k)> on_tt;
  std::function<bool(Store&, const Term& cert, const Kont& k)> on_eq;
  std::function<bool(Store&, const Term& cert, const Kont& k)> on_init;
  // and: supply certificates for both subgoals.
  std::function<bool(Store&, const Term& cert,
                     const std::function<bool(const Term&, const Term&)>& k)>
      on_and;
  // or: supply a certificate and a side (1 = left, 2 = right).
  std::function<bool(Store&, const Term& cert,
                     const std::function<bool(const Term&, int)>& k)>
      on_or;
  // some: `w` is the fresh existential variable; the expert may bind it.
  std::function<bool(Store&, const Term& cert, const Term& w,
                     const std::function<bool(const Term&)>& k)>
      on_some;
  // all: `e` is the fresh eigenvariable scoping the subproof.
  std::function<bool(Store&, const Term& cert, const Term& e,
                     const std::function<bool(const Term&)>& k)>
      on_all;
  // backchain: gate unfolding `atom` with the program definition.
  std::function<bool(Store&, const Term& cert, const Term& atom,
                     const std::function<bool(const Term&)>& k)>
      on_backchain;
  // =>, -o, ! clerks.
  std::function<bool(Store&, const Term& cert,
                     const std::function<bool(const Term&)>& k)>
      on_imp;
  std::function<bool(Store&, const Term& cert,
                     const std::function<bool(const Term&)>& k)>
      on_limp;
  std::function<bool(Store&, const Term& cert,
                     const std::function<bool(const Term&)>& k)>
      on_bang;
};

bool check(Store& st, const Program& prog, const Hyps& hyps, const Goal& g,
           const Term& cert, const Fpc& fpc, const EngineOpts& opts,
           const Kont& k);

bool ll_check(Store& st, const Program& prog, const Ctx& in, const Goal& g,
              const Term& cert, const Fpc& fpc, const EngineOpts& opts,
              const LKont& k);

// Mode dispatch with empty hypotheses/context.
bool prove_checked(Store& st, const Program& prog, const Goal& g,
                   const Term& cert, const Fpc& fpc, const EngineOpts& opts,
                   const Kont& k);

}  // namespace pbt
