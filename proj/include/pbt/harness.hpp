#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pbt/fpclib.hpp"
#include "pbt/kernel.hpp"
#include "pbt/syntax.hpp"

namespace pbt {

// One reported variable binding. `value` is deeply resolved, so it stays
// valid after the run's bindings are undone; `printed` is its deterministic
// rendering (used for deduplication and reports).
struct Binding {
  std::string var;
  Term value;
  std::string printed;
};

struct Counterexample {
  std::vector<Binding> bindings;
  std::string key;          // "X = t, Y = u" canonical form
  Term cert_tree = nullptr; // elaborated max record, when the cert had one
  int bound = -1;           // deepen bound that produced it, -1 otherwise
  uint64_t seed = 0;        // sample seed that produced it
  bool has_seed = false;

  const Binding* find(const std::string& var) const;
};

struct RunLimits {
  long long fuel = 1'000'000;  // per search phase
  int max_cex = 1;             // stop after this many; 0 = collect all
};

struct PropRun {
  std::vector<Counterexample> cexes;
  long long tested = 0;        // generator solutions examined
  long long naf_skipped = 0;   // negation checks abandoned on fuel
  bool stopped_early = false;  // hit max_cex
};

// Generate-and-test: enumerate generator solutions under (cert, fpc),
// extend each through the when-goal (exhaustively), and report every
// candidate whose then-goal finitely fails. Throws NonGroundNegation
// (with the property and variable named) if a then-goal is reached with
// unbound variables.
PropRun run_property(Store& st, const Program& prog, const PropertySpec& prop,
                     const Term& cert, const Fpc& fpc, const RunLimits& limits);

struct DeepenRun {
  std::vector<Counterexample> cexes;  // deduplicated, (bound, found) order
  int first_cex_bound = -1;
  long long tested = 0;
  long long naf_skipped = 0;
};

// Iterative deepening: run the property at height lo..hi; with a nonzero
// size_factor each bound pairs "height h" with "sze (h*size_factor) _".
// A counterexample found at several bounds is reported once, at the first.
DeepenRun deepen(Store& st, const Program& prog, const PropertySpec& prop,
                 int lo, int hi, int size_factor, const RunLimits& limits);

struct SampleRun {
  std::vector<Counterexample> cexes;
  std::vector<std::string> values;  // printed bindings of each generation
  long long attempts = 0;
  long long discards = 0;  // generation failures and fuel-outs
  long long tested = 0;
  long long naf_skipped = 0;
};

// n independent weighted-random generation attempts (seeds derived from
// `seed` by index), each committed to its first solution and run through
// the when/then pipeline. Failed or fuel-exhausted generations are counted
// as discards.
SampleRun sample(Store& st, const Program& prog, const PropertySpec& prop,
                 long long n, uint64_t seed, const RunLimits& limits);

// Counterexample minimization. Re-elaborates the stored bindings to
// recover the proof's witnesses (collect) and shape (max), then re-runs the
// generator restricted to subterms of those witnesses, sweeping the height
// bound upward to the lowest one that still admits a counterexample; after
// that, passes with proper subterms look for strictly smaller
// counterexamples at the same height until none is found. The result is a
// local minimum. Throws ShrinkUnsupported when the proof's witnesses are
// not closed first-order terms (e.g. under binders).
Counterexample shrink(Store& st, const Program& prog,
                      const PropertySpec& prop, const Counterexample& cex,
                      const RunLimits& limits);

// Re-check stored bindings: generator and when-goal provable with the
// variables pinned to `values` (parallel to prop.vars), and the then-goal
// still finitely fails.
bool replay_ok(Store& st, const Program& prog, const PropertySpec& prop,
               const std::vector<Term>& values, long long fuel);

}  // namespace pbt
