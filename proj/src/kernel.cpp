#include "pbt/kernel.hpp"

#include <algorithm>
#include <cassert>

#include "pbt/errors.hpp"
#include "pbt/unify.hpp"

namespace pbt {

namespace {

void spend(const EngineOpts& opts) {
  if (opts.fuel) opts.fuel->spend();
}

std::vector<Term> hyp_list(const Hyps& hyps) {
  std::vector<Term> out;
  for (const HypNode* n = hyps.get(); n; n = n->next.get())
    out.push_back(n->atom);
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

long long g_check_steps = 0;  // TRACE

bool check(Store& st, const Program& prog, const Hyps& hyps, const Goal& g,
           const Term& cert, const Fpc& fpc, const EngineOpts& opts,
           const Kont& k) {
  ++g_check_steps;  // TRACE
  DepthGuard guard(opts.fuel);
  switch (g->tag) {
    case GoalTag::Tt:
      return fpc.on_tt(st, cert, k);
    case GoalTag::Ff:
      return false;
    case GoalTag::Eq:
      return fpc.on_eq(st, cert, [&] {
        auto m = st.mark();
        if (unify(st, g->t1, g->t2)) {
          if (k()) return true;
        }
        st.undo_to(m);
        return false;
      });
    case GoalTag::And:
      return fpc.on_and(st, cert, [&](const Term& c1, const Term& c2) {
        return check(st, prog, hyps, g->g1, c1, fpc, opts, [&] {
          return check(st, prog, hyps, g->g2, c2, fpc, opts, k);
        });
      });
    case GoalTag::Or:
      return fpc.on_or(st, cert, [&](const Term& c, int side) {
        const Goal& sub = side == 1 ? g->g1 : g->g2;
        return check(st, prog, hyps, sub, c, fpc, opts, k);
      });
    case GoalTag::Some: {
      Term w = st.fresh_meta(g->bname);
      return fpc.on_some(st, cert, w, [&](const Term& c) {
        return check(st, prog, hyps, goal_open(g->g1, w), c, fpc, opts, k);
      });
    }
    case GoalTag::All: {
      Term e = st.fresh_eigen(g->bname);
      return fpc.on_all(st, cert, e, [&](const Term& c) {
        return check(st, prog, hyps, goal_open(g->g1, e), c, fpc, opts, k);
      });
    }
    case GoalTag::ImpI:
      return fpc.on_imp(st, cert, [&](const Term& c) {
        auto node = std::make_shared<HypNode>();
        node->atom = g->t1;
        node->next = hyps;
        return check(st, prog, node, g->g1, c, fpc, opts, k);
      });
    case GoalTag::ImpL:
    case GoalTag::Bang:
      throw EngineError("linear goal in non-linear program");
    case GoalTag::Atom: {
      auto [head, args] = spine(st, g->t1);
      if (head->tag == Tag::Meta)
        throw EngineError("goal head is an unbound variable");
      bool is_axiom = head->tag == Tag::Const && args.empty() &&
                      prog.axioms.count(head->name) != 0;
      if (fpc.on_init(st, cert, [&] {
            for (const Term& h : hyp_list(hyps)) {
              auto m = st.mark();
              if (unify(st, g->t1, h)) {
                spend(opts);
                if (k()) return true;
              }
              st.undo_to(m);
            }
            if (is_axiom) {
              spend(opts);
              return k();
            }
            return false;
          }))
        return true;
      if (head->tag != Tag::Const || is_axiom) return false;
      const CompiledPred* p = prog.find_pred(head->name);
      if (!p || p->arity != static_cast<int>(args.size())) return false;
      return fpc.on_backchain(st, cert, g->t1, [&](const Term& c) {
        spend(opts);
        return check(st, prog, hyps, goal_open(p->body, args), c, fpc, opts,
                     k);
      });
    }
  }
  return false;
}

bool ll_check(Store& st, const Program& prog, const Ctx& in, const Goal& g,
              const Term& cert, const Fpc& fpc, const EngineOpts& opts,
              const LKont& k) {
  DepthGuard guard(opts.fuel);
  switch (g->tag) {
    case GoalTag::Tt:
      return fpc.on_tt(st, cert, [&] { return k(in); });
    case GoalTag::Ff:
      return false;
    case GoalTag::Eq:
      return fpc.on_eq(st, cert, [&] {
        auto m = st.mark();
        if (unify(st, g->t1, g->t2)) {
          if (k(in)) return true;
        }
        st.undo_to(m);
        return false;
      });
    case GoalTag::And:
      return fpc.on_and(st, cert, [&](const Term& c1, const Term& c2) {
        return ll_check(st, prog, in, g->g1, c1, fpc, opts,
                        [&](const Ctx& mid) {
                          return ll_check(st, prog, mid, g->g2, c2, fpc,
                                          opts, k);
                        });
      });
    case GoalTag::Or:
      return fpc.on_or(st, cert, [&](const Term& c, int side) {
        const Goal& sub = side == 1 ? g->g1 : g->g2;
        return ll_check(st, prog, in, sub, c, fpc, opts, k);
      });
    case GoalTag::Some: {
      Term w = st.fresh_meta(g->bname);
      return fpc.on_some(st, cert, w, [&](const Term& c) {
        return ll_check(st, prog, in, goal_open(g->g1, w), c, fpc, opts, k);
      });
    }
    case GoalTag::All: {
      Term e = st.fresh_eigen(g->bname);
      return fpc.on_all(st, cert, e, [&](const Term& c) {
        return ll_check(st, prog, in, goal_open(g->g1, e), c, fpc, opts, k);
      });
    }
    case GoalTag::ImpL:
      return fpc.on_limp(st, cert, [&](const Term& c) {
        Ctx nc = in;
        nc.push_back(ROpt{RKind::Bnd, g->t1});
        return ll_check(st, prog, nc, g->g1, c, fpc, opts,
                        [&](const Ctx& out) {
                          assert(out.size() == in.size() + 1);
                          if (out.back().kind != RKind::Del) return false;
                          Ctx trimmed(out.begin(), out.end() - 1);
                          return k(trimmed);
                        });
      });
    case GoalTag::ImpI:
      return fpc.on_imp(st, cert, [&](const Term& c) {
        Ctx nc = in;
        nc.push_back(ROpt{RKind::Ubnd, g->t1});
        return ll_check(st, prog, nc, g->g1, c, fpc, opts,
                        [&](const Ctx& out) {
                          assert(out.size() == in.size() + 1);
                          Ctx trimmed(out.begin(), out.end() - 1);
                          return k(trimmed);
                        });
      });
    case GoalTag::Bang:
      return fpc.on_bang(st, cert, [&](const Term& c) {
        return ll_check(st, prog, in, g->g1, c, fpc, opts,
                        [&](const Ctx& out) {
                          assert(out.size() == in.size());
                          for (size_t i = 0; i < in.size(); ++i)
                            if (out[i].kind != in[i].kind) return false;
                          return k(in);
                        });
      });
    case GoalTag::Atom: {
      auto [head, args] = spine(st, g->t1);
      if (head->tag == Tag::Meta)
        throw EngineError("goal head is an unbound variable");
      bool is_axiom = head->tag == Tag::Const && args.empty() &&
                      prog.axioms.count(head->name) != 0;
      if (fpc.on_init(st, cert, [&] {
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
            if (is_axiom) {
              spend(opts);
              return k(in);
            }
            return false;
          }))
        return true;
      if (head->tag != Tag::Const || is_axiom) return false;
      const CompiledPred* p = prog.find_pred(head->name);
      if (!p || p->arity != static_cast<int>(args.size())) return false;
      return fpc.on_backchain(st, cert, g->t1, [&](const Term& c) {
        spend(opts);
        return ll_check(st, prog, in, goal_open(p->body, args), c, fpc, opts,
                        k);
      });
    }
  }
  return false;
}

bool prove_checked(Store& st, const Program& prog, const Goal& g,
                   const Term& cert, const Fpc& fpc, const EngineOpts& opts,
                   const Kont& k) {
  if (prog.mode == Mode::Linear) {
    return ll_check(st, prog, Ctx{}, g, cert, fpc, opts,
                    [&](const Ctx&) { return k(); });
  }
  return check(st, prog, Hyps{}, g, cert, fpc, opts, k);
}

}  // namespace pbt
