#include "pbt/engine.hpp"

#include <algorithm>
#include <cassert>
#include <utility>

#include "pbt/errors.hpp"
#include "pbt/unify.hpp"

namespace pbt {

void FuelBudget::spend() {
  if (remaining <= 0) throw FuelExhausted();
  --remaining;
}

namespace {

void spend(const EngineOpts& opts) {
  if (opts.fuel) opts.fuel->spend();
}

// Collect hypotheses oldest-first.
std::vector<Term> hyp_list(const Hyps& hyps) {
  std::vector<Term> out;
  for (const HypNode* n = hyps.get(); n; n = n->next.get())
    out.push_back(n->atom);
  std::reverse(out.begin(), out.end());
  return out;
}

bool term_is_ground(Store& st, const Term& t) { return st.is_ground(t); }

bool goal_is_ground(Store& st, const Goal& g) {
  switch (g->tag) {
    case GoalTag::Tt:
    case GoalTag::Ff:
      return true;
    case GoalTag::Eq:
      return term_is_ground(st, g->t1) && term_is_ground(st, g->t2);
    case GoalTag::Atom:
      return term_is_ground(st, g->t1);
    case GoalTag::And:
    case GoalTag::Or:
      return goal_is_ground(st, g->g1) && goal_is_ground(st, g->g2);
    case GoalTag::Some:
    case GoalTag::All:
    case GoalTag::Bang:
      return goal_is_ground(st, g->g1);
    case GoalTag::ImpI:
    case GoalTag::ImpL:
      return term_is_ground(st, g->t1) && goal_is_ground(st, g->g1);
  }
  return true;
}

}  // namespace

bool solve(Store& st, const Program& prog, const Hyps& hyps, const Goal& g,
           const EngineOpts& opts, const Kont& k) {
  DepthGuard guard(opts.fuel);
  switch (g->tag) {
    case GoalTag::Tt:
      return k();
    case GoalTag::Ff:
      return false;
    case GoalTag::Eq: {
      auto m = st.mark();
      if (unify(st, g->t1, g->t2)) {
        if (k()) return true;
      }
      st.undo_to(m);
      return false;
    }
    case GoalTag::And:
      return solve(st, prog, hyps, g->g1, opts,
                   [&] { return solve(st, prog, hyps, g->g2, opts, k); });
    case GoalTag::Or:
      if (solve(st, prog, hyps, g->g1, opts, k)) return true;
      return solve(st, prog, hyps, g->g2, opts, k);
    case GoalTag::Some: {
      Term w = st.fresh_meta(g->bname);
      return solve(st, prog, hyps, goal_open(g->g1, w), opts, k);
    }
    case GoalTag::All: {
      Term e = st.fresh_eigen(g->bname);
      return solve(st, prog, hyps, goal_open(g->g1, e), opts, k);
    }
    case GoalTag::ImpI: {
      auto node = std::make_shared<HypNode>();
      node->atom = g->t1;
      node->next = hyps;
      return solve(st, prog, node, g->g1, opts, k);
    }
    case GoalTag::ImpL:
    case GoalTag::Bang:
      throw EngineError("linear goal in non-linear program");
    case GoalTag::Atom: {
      auto [head, args] = spine(st, g->t1);
      if (head->tag == Tag::Meta)
        throw EngineError("goal head is an unbound variable");
      // Hypotheses first, oldest first.
      for (const Term& h : hyp_list(hyps)) {
        auto m = st.mark();
        if (unify(st, g->t1, h)) {
          spend(opts);
          if (k()) return true;
        }
        st.undo_to(m);
      }
      if (head->tag != Tag::Const) return false;
      if (args.empty() &&
          prog.axioms.count(head->name) != 0) {
        spend(opts);
        return k();
      }
      const CompiledPred* p = prog.find_pred(head->name);
      if (!p || p->arity != static_cast<int>(args.size())) return false;
      spend(opts);
      return solve(st, prog, hyps, goal_open(p->body, args), opts, k);
    }
  }
  return false;
}

bool ll_solve(Store& st, const Program& prog, const Ctx& in, const Goal& g,
              const EngineOpts& opts, const LKont& k) {
  DepthGuard guard(opts.fuel);
  switch (g->tag) {
    case GoalTag::Tt:
      return k(in);
    case GoalTag::Ff:
      return false;
    case GoalTag::Eq: {
      auto m = st.mark();
      if (unify(st, g->t1, g->t2)) {
        if (k(in)) return true;
      }
      st.undo_to(m);
      return false;
    }
    case GoalTag::And:
      return ll_solve(st, prog, in, g->g1, opts, [&](const Ctx& mid) {
        return ll_solve(st, prog, mid, g->g2, opts, k);
      });
    case GoalTag::Or:
      if (ll_solve(st, prog, in, g->g1, opts, k)) return true;
      return ll_solve(st, prog, in, g->g2, opts, k);
    case GoalTag::Some: {
      Term w = st.fresh_meta(g->bname);
      return ll_solve(st, prog, in, goal_open(g->g1, w), opts, k);
    }
    case GoalTag::All: {
      Term e = st.fresh_eigen(g->bname);
      return ll_solve(st, prog, in, goal_open(g->g1, e), opts, k);
    }
    case GoalTag::ImpL: {
      Ctx nc = in;
      nc.push_back(ROpt{RKind::Bnd, g->t1});
      return ll_solve(st, prog, nc, g->g1, opts, [&](const Ctx& out) {
        assert(out.size() == in.size() + 1);
        if (out.back().kind != RKind::Del) return false;  // not consumed
        Ctx trimmed(out.begin(), out.end() - 1);
        return k(trimmed);
      });
    }
    case GoalTag::ImpI: {
      Ctx nc = in;
      nc.push_back(ROpt{RKind::Ubnd, g->t1});
      return ll_solve(st, prog, nc, g->g1, opts, [&](const Ctx& out) {
        assert(out.size() == in.size() + 1);
        Ctx trimmed(out.begin(), out.end() - 1);
        return k(trimmed);
      });
    }
    case GoalTag::Bang:
      return ll_solve(st, prog, in, g->g1, opts, [&](const Ctx& out) {
        assert(out.size() == in.size());
        for (size_t i = 0; i < in.size(); ++i)
          if (out[i].kind != in[i].kind) return false;  // consumed something
        return k(in);
      });
    case GoalTag::Atom: {
      auto [head, args] = spine(st, g->t1);
      if (head->tag == Tag::Meta)
        throw EngineError("goal head is an unbound variable");
      // Context first, oldest first. Bnd entries are consumed, Ubnd stay.
      for (size_t i = 0; i < in.size(); ++i) {
        if (in[i].kind == RKind::Del) continue;
        auto m = st.mark();
        if (unify(st, g->t1, in[i].atom)) {
          spend(opts);
          if (in[i].kind == RKind::Bnd) {
            Ctx nc = in;
            nc[i].kind = RKind::Del;
            if (k(nc)) return true;
          } else {
            if (k(in)) return true;
          }
        }
        st.undo_to(m);
      }
      if (head->tag != Tag::Const) return false;
      if (args.empty() && prog.axioms.count(head->name) != 0) {
        spend(opts);
        return k(in);
      }
      const CompiledPred* p = prog.find_pred(head->name);
      if (!p || p->arity != static_cast<int>(args.size())) return false;
      spend(opts);
      return ll_solve(st, prog, in, goal_open(p->body, args), opts, k);
    }
  }
  return false;
}

bool prove(Store& st, const Program& prog, const Goal& g,
           const EngineOpts& opts, const Kont& k) {
  if (prog.mode == Mode::Linear) {
    return ll_solve(st, prog, Ctx{}, g, opts,
                    [&](const Ctx&) { return k(); });
  }
  return solve(st, prog, Hyps{}, g, opts, k);
}

bool naf(Store& st, const Program& prog, const Goal& g, long long fuel) {
  if (!goal_is_ground(st, g))
    throw NonGroundNegation("negated goal is not ground");
  FuelBudget budget{fuel};
  EngineOpts opts{&budget};
  auto m = st.mark();
  bool proved = false;
  try {
    proved = prove(st, prog, g, opts, [] { return true; });
  } catch (...) {
    st.undo_to(m);
    throw;
  }
  st.undo_to(m);
  return !proved;
}

}  // namespace pbt
