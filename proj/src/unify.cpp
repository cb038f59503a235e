#include "pbt/unify.hpp"

#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pbt/errors.hpp"

namespace pbt {

namespace {

struct Unifier {
  Store& st;

  // State for inverting a term into the body of the metavariable `m_id`
  // (level `lm`, `n` abstracted pattern arguments).
  struct InvertCtx {
    int m_id = 0;
    int lm = 0;
    int n = 0;
    std::unordered_map<int, int> outer;  // eigen id -> argument position
    std::vector<Term> outer_args;        // the pattern arguments themselves
    std::unordered_map<int, int> inner;  // eigen id -> binder body depth
  };

  // Non-throwing test of the pattern condition on an argument list.
  bool is_pattern(const std::vector<Term>& raw, int lvl) {
    std::unordered_set<int> seen;
    for (const auto& a0 : raw) {
      Term a = st.whnf(a0);
      if (a->tag != Tag::Eigen || a->level <= lvl || !seen.insert(a->id).second)
        return false;
    }
    return true;
  }

  // Checks that `raw` is a list of distinct eigenvariables newer than
  // level `lvl` (the pattern condition) and returns them whnf'd.
  std::vector<Term> pattern_args(const std::vector<Term>& raw, int lvl) {
    std::vector<Term> es;
    es.reserve(raw.size());
    std::unordered_set<int> seen;
    for (const auto& a0 : raw) {
      Term a = st.whnf(a0);
      if (a->tag != Tag::Eigen || a->level <= lvl || !seen.insert(a->id).second)
        throw NonPatternProblem(
            "metavariable applied to something other than distinct newer "
            "eigenvariables");
      es.push_back(a);
    }
    return es;
  }

  // Rewrite `t` into a de Bruijn body for the metavariable described by C.
  // Returns nullptr when no unifier exists (occurs check, scope escape).
  Term invert(InvertCtx& C, const Term& t0, int depth) {
    Term t = st.whnf(t0);
    switch (t->tag) {
      case Tag::Const:
      case Tag::Int:
      case Tag::Bound:
        return t;
      case Tag::Eigen: {
        if (auto it = C.inner.find(t->id); it != C.inner.end())
          return mk_bound(depth - it->second);
        if (auto it = C.outer.find(t->id); it != C.outer.end())
          return mk_bound(depth + C.n - 1 - it->second);
        if (t->level <= C.lm) return t;
        return nullptr;  // newer eigenvariable the metavariable cannot see
      }
      case Tag::Abs: {
        Term e = st.fresh_eigen(t->name);
        C.inner[e->id] = depth + 1;
        Term b = invert(C, open_term(t->body, e), depth + 1);
        C.inner.erase(e->id);
        return b ? mk_abs(b, t->name) : nullptr;
      }
      case Tag::App:
      case Tag::Meta: {
        auto [h, args] = spine(st, t);
        if (h->tag == Tag::Meta) {
          if (is_pattern(args, h->level)) return invert_flex(C, h, args, depth);
          // Not a pattern occurrence (e.g. a carried beta-redex N applied
          // to arbitrary terms). Keep the flexible head verbatim when it is
          // old enough for the outer metavariable; its arguments are
          // inverted structurally.
          if (h->id == C.m_id) return nullptr;  // occurs check
          if (h->level > C.lm)
            throw NonPatternProblem(
                "newer metavariable applied to non-eigenvariable arguments");
          std::vector<Term> out;
          out.reserve(args.size());
          for (const auto& a : args) {
            Term x = invert(C, a, depth);
            if (!x) return nullptr;
            out.push_back(x);
          }
          return mk_apps(h, out);
        }
        Term hh = invert(C, h, depth);
        if (!hh) return nullptr;
        std::vector<Term> out;
        out.reserve(args.size());
        for (const auto& a : args) {
          Term x = invert(C, a, depth);
          if (!x) return nullptr;
          out.push_back(x);
        }
        return mk_apps(hh, out);
      }
      default:
        return nullptr;  // FVar: never reaches the engine
    }
  }

  // A flexible occurrence N(args) inside the term being inverted. Keeps the
  // arguments the outer metavariable can express and prunes the rest. When
  // N is newer than the outer metavariable it is lowered, but raised over
  // the outer pattern arguments it may legitimately depend on — so a
  // witness created under a binder stays free to mention that binder.
  Term invert_flex(InvertCtx& C, const Term& n_meta,
                   const std::vector<Term>& args, int depth) {
    if (n_meta->id == C.m_id) return nullptr;  // occurs check
    if (!is_pattern(args, n_meta->level)) {
      // Outside the pattern fragment no pruning is possible, but a head
      // already visible at the target level can carry through verbatim
      // with its arguments inverted pointwise, like a rigid application.
      if (n_meta->level > C.lm)
        throw NonPatternProblem(
            "metavariable applied to something other than distinct newer "
            "eigenvariables");
      std::vector<Term> occ;
      occ.reserve(args.size());
      for (const Term& a : args) {
        Term t = invert(C, a, depth);
        if (!t) return nullptr;
        occ.push_back(t);
      }
      return mk_apps(n_meta, occ);
    }
    std::vector<Term> es = pattern_args(args, n_meta->level);
    std::vector<int> keep;
    std::vector<Term> occ;  // kept arguments, as seen from the outer body
    for (size_t i = 0; i < es.size(); ++i) {
      const Term& a = es[i];
      if (auto it = C.inner.find(a->id); it != C.inner.end()) {
        keep.push_back((int)i);
        occ.push_back(mk_bound(depth - it->second));
      } else if (auto it2 = C.outer.find(a->id); it2 != C.outer.end()) {
        keep.push_back((int)i);
        occ.push_back(mk_bound(depth + C.n - 1 - it2->second));
      } else if (a->level <= C.lm) {
        keep.push_back((int)i);
        occ.push_back(a);
      }
      // else: prune this dependency from N
    }
    bool pruned = keep.size() != es.size();
    bool lowered = n_meta->level > C.lm;
    if (!pruned && !lowered) return mk_apps(n_meta, occ);
    // Outer pattern arguments older than N that N's instantiation may
    // still mention once it is lowered.
    std::vector<Term> raise_terms, raise_occ;
    if (lowered) {
      for (int p = 0; p < C.n; ++p) {
        const Term& e = C.outer_args[p];
        if (e->level <= n_meta->level) {
          raise_terms.push_back(e);
          raise_occ.push_back(mk_bound(depth + C.n - 1 - p));
        }
      }
    }
    Term fresh = st.fresh_meta_at(std::min(n_meta->level, C.lm), n_meta->name);
    int k = (int)es.size();
    std::vector<Term> sel;
    sel.reserve(keep.size() + raise_terms.size());
    for (int idx : keep) sel.push_back(mk_bound(k - 1 - idx));
    for (const Term& e : raise_terms) sel.push_back(e);
    Term body = mk_apps(fresh, sel);
    for (int i = 0; i < k; ++i) body = mk_abs(body);
    st.bind(n_meta, body);
    std::vector<Term> occ2 = occ;
    occ2.insert(occ2.end(), raise_occ.begin(), raise_occ.end());
    return mk_apps(fresh, occ2);
  }

  // M(as) = M(bs): succeed when the argument lists agree, otherwise prune
  // M to the agreeing positions.
  bool same_meta(const Term& m, const std::vector<Term>& as,
                 const std::vector<Term>& bs) {
    std::vector<Term> ea = pattern_args(as, m->level);
    std::vector<Term> eb = pattern_args(bs, m->level);
    if (ea.size() != eb.size())
      throw NonPatternProblem(
          "metavariable applied to differing numbers of arguments");
    std::vector<int> keep;
    for (size_t i = 0; i < ea.size(); ++i)
      if (ea[i]->id == eb[i]->id) keep.push_back((int)i);
    if (keep.size() == ea.size()) return true;
    Term fresh = st.fresh_meta_at(m->level, m->name);
    int k = (int)ea.size();
    std::vector<Term> sel;
    sel.reserve(keep.size());
    for (int idx : keep) sel.push_back(mk_bound(k - 1 - idx));
    Term body = mk_apps(fresh, sel);
    for (int i = 0; i < k; ++i) body = mk_abs(body);
    st.bind(m, body);
    return true;
  }

  // Bind the metavariable `m` applied to `raw_args` to the term `rhs`.
  bool bind_flex(const Term& m, const std::vector<Term>& raw_args,
                 const Term& rhs) {
    InvertCtx C;
    C.m_id = m->id;
    C.lm = m->level;
    std::vector<Term> es = pattern_args(raw_args, m->level);
    for (size_t i = 0; i < es.size(); ++i) C.outer[es[i]->id] = (int)i;
    C.outer_args = es;
    C.n = (int)es.size();
    Term body = invert(C, rhs, 0);
    if (!body) return false;
    for (int i = 0; i < C.n; ++i) body = mk_abs(body);
    st.bind(m, body);
    return true;
  }

  bool unify_rec(const Term& a, const Term& b) {
    if (term_eq(st, a, b)) return true;  // identical sides need no analysis
    auto [ha, as] = spine(st, a);
    auto [hb, bs] = spine(st, b);
    bool fa = ha->tag == Tag::Meta;
    bool fb = hb->tag == Tag::Meta;
    if (fa && fb && ha->id == hb->id) return same_meta(ha, as, bs);
    if (fa && fb)
      return ha->level >= hb->level ? bind_flex(ha, as, b)
                                    : bind_flex(hb, bs, a);
    if (fa) return bind_flex(ha, as, b);
    if (fb) return bind_flex(hb, bs, a);
    if (ha->tag == Tag::Abs || hb->tag == Tag::Abs) {
      if (ha->tag != hb->tag) return false;  // no eta
      Term e = st.fresh_eigen(ha->name);
      return unify_rec(open_term(ha->body, e), open_term(hb->body, e));
    }
    if (ha->tag != hb->tag) return false;
    switch (ha->tag) {
      case Tag::Const:
        if (ha->name != hb->name) return false;
        break;
      case Tag::Int:
        if (ha->ival != hb->ival) return false;
        break;
      case Tag::Eigen:
        if (ha->id != hb->id) return false;
        break;
      case Tag::Bound:
        if (ha->index != hb->index) return false;
        break;
      default:
        return false;
    }
    if (as.size() != bs.size()) return false;
    for (size_t i = 0; i < as.size(); ++i)
      if (!unify_rec(as[i], bs[i])) return false;
    return true;
  }
};

}  // namespace

bool unify(Store& st, const Term& a, const Term& b) {
  size_t m = st.mark();
  bool ok = false;
  try {
    ok = Unifier{st}.unify_rec(a, b);
  } catch (...) {
    st.undo_to(m);
    throw;
  }
  if (!ok) st.undo_to(m);
  return ok;
}

}  // namespace pbt
