#include "pbt/harness.hpp"

#include <algorithm>
#include <chrono>    // TRACE
#include <cstdio>    // TRACE
#include <cstdlib>   // TRACE
#include <functional>
#include <set>

#include "pbt/engine.hpp"
#include "pbt/errors.hpp"
#include "pbt/printer.hpp"
#include "pbt/terms.hpp"
#include "pbt/unify.hpp"

namespace pbt {

const Binding* Counterexample::find(const std::string& var) const {
  for (const auto& b : bindings)
    if (b.var == var) return &b;
  return nullptr;
}

namespace {

// One property instantiation: fresh metavariables for the shared variable
// frame and the three goals opened over them.
struct Instance {
  std::vector<Term> metas;
  Goal gen, when, then;

  Instance(Store& st, const PropertySpec& prop) {
    metas.reserve(prop.vars.size());
    for (const auto& v : prop.vars) metas.push_back(st.fresh_meta(v));
    gen = goal_open(prop.gen, metas);
    when = prop.when ? goal_open(prop.when, metas) : nullptr;
    then = goal_open(prop.then, metas);
  }
};

Counterexample snapshot(Store& st, const Program& prog,
                        const PropertySpec& prop, const Instance& inst,
                        const Term& cert) {
  Counterexample cex;
  Printer pr(st, &prog);
  std::string key;
  for (size_t i = 0; i < prop.vars.size(); ++i) {
    Binding b;
    b.var = prop.vars[i];
    b.value = st.resolve(inst.metas[i]);
    b.printed = pr.term(b.value);
    if (!key.empty()) key += ", ";
    key += b.var + " = " + b.printed;
    cex.bindings.push_back(std::move(b));
  }
  cex.key = std::move(key);
  if (cert && cert_records(st, cert)) {
    Term tree = maxtree_of(st, cert);
    if (tree) cex.cert_tree = st.resolve(tree);
  }
  return cex;
}

// Run the generate/when/then pipeline once. on_cex is called with all
// bindings still in place; returning true stops the whole search (bindings
// are then undone by the caller's mark).
struct Pipeline {
  Store& st;
  const Program& prog;
  const PropertySpec& prop;
  const RunLimits& limits;
  long long tested = 0;
  long long naf_skipped = 0;

  bool run(const Instance& inst, const Term& cert, const Fpc& fpc,
           const std::function<bool()>& on_cex) {
    FuelBudget gen_fuel{limits.fuel};
    EngineOpts gen_opts{&gen_fuel};
    return prove_checked(st, prog, inst.gen, cert, fpc, gen_opts, [&] {
      ++tested;
      auto test_then = [&]() -> bool {
        bool is_cex = false;
        try {
          is_cex = naf(st, prog, inst.then, limits.fuel);
        } catch (const FuelExhausted&) {
          ++naf_skipped;
          return false;
        } catch (const NonGroundNegation&) {
          std::string var = "?";
          for (size_t i = 0; i < prop.vars.size(); ++i) {
            if (!st.is_ground(inst.metas[i])) {
              var = prop.vars[i];
              break;
            }
          }
          throw NonGroundNegation(prop.name +
                                  ": negated goal is not ground (variable " +
                                  var + ")");
        }
        return is_cex && on_cex();
      };
      if (!inst.when) return test_then();
      FuelBudget when_fuel{limits.fuel};
      EngineOpts when_opts{&when_fuel};
      return prove(st, prog, inst.when, when_opts, test_then);
    });
  }
};

long long term_size(const Store& st, const Term& t0) {
  Term t = st.whnf(t0);
  switch (t->tag) {
    case Tag::App:
      return 1 + term_size(st, t->fn) + term_size(st, t->arg);
    case Tag::Abs:
      return 1 + term_size(st, t->body);
    default:
      return 1;
  }
}

long long cex_size(const Store& st, const std::vector<Term>& values) {
  long long n = 0;
  for (const auto& v : values) n += term_size(st, v);
  return n;
}

}  // namespace

PropRun run_property(Store& st, const Program& prog, const PropertySpec& prop,
                     const Term& cert, const Fpc& fpc,
                     const RunLimits& limits) {
  PropRun out;
  auto m = st.mark();
  try {
    Instance inst(st, prop);
    Pipeline pipe{st, prog, prop, limits};
    bool stopped = pipe.run(inst, cert, fpc, [&] {
      out.cexes.push_back(snapshot(st, prog, prop, inst, cert));
      return limits.max_cex > 0 &&
             (long long)out.cexes.size() >= limits.max_cex;
    });
    out.stopped_early = stopped;
    out.tested = pipe.tested;
    out.naf_skipped = pipe.naf_skipped;
  } catch (...) {
    st.undo_to(m);
    throw;
  }
  st.undo_to(m);
  return out;
}

DeepenRun deepen(Store& st, const Program& prog, const PropertySpec& prop,
                 int lo, int hi, int size_factor, const RunLimits& limits) {
  DeepenRun out;
  std::set<std::string> seen;
  for (int h = lo; h <= hi; ++h) {
    Term cert = height_cert(h);
    if (size_factor > 0)
      cert = pair_cert(cert, sze_cert(st, h * size_factor));
    Fpc fpc = standard_fpc(&prog);
    RunLimits per = limits;
    // When capped, only new counterexamples count toward the cap; run
    // uncapped per bound and trim below. Lower bounds re-find all smaller
    // proofs, so a capped per-bound run could stall on duplicates.
    per.max_cex = 0;
    PropRun run = run_property(st, prog, prop, cert, fpc, per);
    out.tested += run.tested;
    out.naf_skipped += run.naf_skipped;
    for (auto& cex : run.cexes) {
      if (!seen.insert(cex.key).second) continue;
      cex.bound = h;
      out.cexes.push_back(std::move(cex));
      if (out.first_cex_bound < 0) out.first_cex_bound = h;
      if (limits.max_cex > 0 &&
          (long long)out.cexes.size() >= limits.max_cex)
        return out;
    }
  }
  return out;
}

SampleRun sample(Store& st, const Program& prog, const PropertySpec& prop,
                 long long n, uint64_t seed, const RunLimits& limits) {
  SampleRun out;
  for (long long i = 0; i < n; ++i) {
    ++out.attempts;
    uint64_t attempt_seed = RandomSource::derive(seed, (uint64_t)i);
    auto rnd = RandomSource::seeded(attempt_seed);
    Fpc fpc = standard_fpc(&prog, rnd);
    Term cert = noweight_cert();
    auto m = st.mark();
    try {
      Instance inst(st, prop);
      FuelBudget gen_fuel{limits.fuel};
      EngineOpts gen_opts{&gen_fuel};
      // Commit to the first random generation; a failed draw is a discard.
      bool generated = prove_checked(st, prog, inst.gen, cert, fpc, gen_opts,
                                     [] { return true; });
      if (!generated) {
        ++out.discards;
        st.undo_to(m);
        continue;
      }
      ++out.tested;
      {
        Printer pr(st, &prog);
        std::string v;
        for (size_t j = 0; j < prop.vars.size(); ++j) {
          if (j) v += ", ";
          v += prop.vars[j] + " = " + pr.term(st.resolve(inst.metas[j]));
        }
        out.values.push_back(std::move(v));
      }
      Pipeline pipe{st, prog, prop, limits};
      auto test_then = [&]() -> bool {
        bool is_cex = false;
        try {
          is_cex = naf(st, prog, inst.then, limits.fuel);
        } catch (const FuelExhausted&) {
          ++out.naf_skipped;
          return false;
        }
        if (is_cex) {
          Counterexample cex = snapshot(st, prog, prop, inst, cert);
          cex.seed = attempt_seed;
          cex.has_seed = true;
          out.cexes.push_back(std::move(cex));
        }
        return false;  // examine every when-branch of the sampled value
      };
      if (inst.when) {
        FuelBudget when_fuel{limits.fuel};
        EngineOpts when_opts{&when_fuel};
        prove(st, prog, inst.when, when_opts, test_then);
      } else {
        test_then();
      }
    } catch (const FuelExhausted&) {
      ++out.discards;
    }
    st.undo_to(m);
  }
  return out;
}

namespace {

// Bind the property's variables to stored values and elaborate the
// generator under `cert`, leaving bindings in place on success.
bool elaborate_values(Store& st, const Program& prog,
                      const PropertySpec& prop, const Instance& inst,
                      const std::vector<Term>& values, const Term& cert,
                      const Fpc& fpc, long long fuel) {
  for (size_t i = 0; i < values.size(); ++i)
    if (!unify(st, inst.metas[i], values[i])) return false;
  FuelBudget budget{fuel};
  EngineOpts opts{&budget};
  return prove_checked(st, prog, inst.gen, cert, fpc, opts,
                       [] { return true; });
}

}  // namespace

Counterexample shrink(Store& st, const Program& prog,
                      const PropertySpec& prop, const Counterexample& cex,
                      const RunLimits& limits) {
  std::vector<Term> current;
  for (const auto& b : cex.bindings) current.push_back(b.value);
  if (current.size() != prop.vars.size())
    throw ShrinkUnsupported(prop.name + ": counterexample does not bind the "
                            "property frame");

  // Recover witnesses and proof shape from the stored bindings.
  std::vector<Term> items;
  int height = 0;
  {
    auto m = st.mark();
    Instance inst(st, prop);
    Term collect = collect_cert(st);
    Term max = max_cert(st);
    Term cert = pair_cert(collect, max);
    Fpc fpc = standard_fpc(&prog);
    bool ok = elaborate_values(st, prog, prop, inst, current, cert, fpc,
                               limits.fuel);
    if (!ok) {
      st.undo_to(m);
      throw ShrinkUnsupported(prop.name +
                              ": stored bindings do not re-elaborate");
    }
    for (const auto& it : collect_items(st, cert))
      items.push_back(st.resolve(it));
    height = maxtree_height(st, maxtree_of(st, cert));
    st.undo_to(m);
  }
  for (const auto& it : items)
    if (!st.is_ground(it))
      throw ShrinkUnsupported(prop.name +
                              ": proof witnesses are not closed terms");
  items = prune_subsumed(st, items);
  long long best_size = cex_size(st, current);

  // Adopt the first counterexample of a restricted re-run, when accept()
  // holds of it; refresh items/height from its own elaboration.
  auto attempt = [&](bool proper, int bound,
                     const std::function<bool(long long)>& accept) -> bool {
    auto trace0 = std::chrono::steady_clock::now();  // TRACE
    auto m = st.mark();
    bool adopted = false;
    try {
      Instance inst(st, prop);
      Term collect = collect_cert(st);
      Term max = max_cert(st);
      Term cert = pair_cert(
          huniv_cert(items, proper),
          pair_cert(height_cert(bound), pair_cert(collect, max)));
      Fpc fpc = standard_fpc(&prog);
      Pipeline pipe{st, prog, prop, limits};
      pipe.run(inst, cert, fpc, [&] {
        std::vector<Term> cand;
        for (const auto& meta : inst.metas) cand.push_back(st.resolve(meta));
        if (!accept(cex_size(st, cand))) return false;
        current = std::move(cand);
        std::vector<Term> fresh_items;
        for (const auto& it : collect_items(st, cert))
          fresh_items.push_back(st.resolve(it));
        items = prune_subsumed(st, fresh_items);
        height = maxtree_height(st, maxtree_of(st, cert));
        best_size = cex_size(st, current);
        adopted = true;
        return true;
      });
    } catch (...) {
      st.undo_to(m);
      throw;
    }
    st.undo_to(m);
    if (std::getenv("PBT_SHRINK_TRACE")) {  // TRACE
      extern long long g_check_steps;
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - trace0)
                    .count();
      std::fprintf(stderr,
                   "  attempt proper=%d bound=%d items=%zu -> %s (%lld ms, %lld steps)\n",
                   (int)proper, bound, items.size(),
                   adopted ? "ADOPT" : "fail", (long long)ms, g_check_steps);
      g_check_steps = 0;
    }
    return adopted;
  };

  // Sweep upward to the lowest bound that admits a counterexample: failed
  // low bounds are cheap (the height gate prunes the space hard), and a
  // bound that failed under these items can never succeed under the
  // adopted proof's items, which are a subset.
  for (int bound = 2; bound < height; ++bound)
    if (attempt(false, bound, [](long long) { return true; })) break;
  // Improve by size at the final height: each pass over proper subterms
  // accepts only a strictly smaller counterexample (guarantees termination).
  while (attempt(true, height, [&](long long sz) { return sz < best_size; })) {
  }

  Counterexample out;
  Printer pr(st, &prog);
  std::string key;
  for (size_t i = 0; i < prop.vars.size(); ++i) {
    Binding b;
    b.var = prop.vars[i];
    b.value = current[i];
    b.printed = pr.term(current[i]);
    if (!key.empty()) key += ", ";
    key += b.var + " = " + b.printed;
    out.bindings.push_back(std::move(b));
  }
  out.key = std::move(key);
  out.bound = cex.bound;
  out.seed = cex.seed;
  out.has_seed = cex.has_seed;
  return out;
}

bool replay_ok(Store& st, const Program& prog, const PropertySpec& prop,
               const std::vector<Term>& values, long long fuel) {
  if (values.size() != prop.vars.size()) return false;
  auto m = st.mark();
  bool ok = false;
  try {
    Instance inst(st, prop);
    bool bound = true;
    for (size_t i = 0; i < values.size(); ++i)
      if (!unify(st, inst.metas[i], values[i])) {
        bound = false;
        break;
      }
    if (bound) {
      Goal g = inst.when ? mk_and(inst.gen, inst.when) : inst.gen;
      FuelBudget budget{fuel};
      EngineOpts opts{&budget};
      bool premise = prove(st, prog, g, opts, [] { return true; });
      ok = premise && naf(st, prog, inst.then, fuel);
    }
  } catch (...) {
    st.undo_to(m);
    throw;
  }
  st.undo_to(m);
  return ok;
}

}  // namespace pbt
