#include "pbt/syntax.hpp"

#include <algorithm>

#include "pbt/errors.hpp"

namespace pbt {

namespace {

Goal make(GoalTag tag) {
  auto g = std::make_shared<GoalNode>();
  g->tag = tag;
  return g;
}

}  // namespace

Goal mk_tt() { return make(GoalTag::Tt); }
Goal mk_ff() { return make(GoalTag::Ff); }

Goal mk_eq(Term a, Term b) {
  auto g = make(GoalTag::Eq);
  auto* n = const_cast<GoalNode*>(g.get());
  n->t1 = std::move(a);
  n->t2 = std::move(b);
  return g;
}

Goal mk_and(Goal a, Goal b) {
  auto g = make(GoalTag::And);
  auto* n = const_cast<GoalNode*>(g.get());
  n->g1 = std::move(a);
  n->g2 = std::move(b);
  return g;
}

Goal mk_or(Goal a, Goal b) {
  auto g = make(GoalTag::Or);
  auto* n = const_cast<GoalNode*>(g.get());
  n->g1 = std::move(a);
  n->g2 = std::move(b);
  return g;
}

Goal mk_some(std::string bname, Goal body) {
  auto g = make(GoalTag::Some);
  auto* n = const_cast<GoalNode*>(g.get());
  n->bname = std::move(bname);
  n->g1 = std::move(body);
  return g;
}

Goal mk_all(std::string bname, Goal body) {
  auto g = make(GoalTag::All);
  auto* n = const_cast<GoalNode*>(g.get());
  n->bname = std::move(bname);
  n->g1 = std::move(body);
  return g;
}

Goal mk_impi(Term antecedent, Goal body) {
  auto g = make(GoalTag::ImpI);
  auto* n = const_cast<GoalNode*>(g.get());
  n->t1 = std::move(antecedent);
  n->g1 = std::move(body);
  return g;
}

Goal mk_impl(Term antecedent, Goal body) {
  auto g = make(GoalTag::ImpL);
  auto* n = const_cast<GoalNode*>(g.get());
  n->t1 = std::move(antecedent);
  n->g1 = std::move(body);
  return g;
}

Goal mk_bang(Goal body) {
  auto g = make(GoalTag::Bang);
  const_cast<GoalNode*>(g.get())->g1 = std::move(body);
  return g;
}

Goal mk_atom(Term t) {
  auto g = make(GoalTag::Atom);
  const_cast<GoalNode*>(g.get())->t1 = std::move(t);
  return g;
}

Term open_term_frame(const Term& t, const std::vector<Term>& vals,
                     int cutoff) {
  switch (t->tag) {
    case Tag::Bound: {
      if (t->index < cutoff) return t;
      size_t s = (size_t)(t->index - cutoff);
      if (s < vals.size()) return vals[s];
      return mk_bound(t->index - (int)vals.size());
    }
    case Tag::App: {
      Term f = open_term_frame(t->fn, vals, cutoff);
      Term a = open_term_frame(t->arg, vals, cutoff);
      return (f == t->fn && a == t->arg) ? t : mk_app(f, a);
    }
    case Tag::Abs: {
      Term b = open_term_frame(t->body, vals, cutoff + 1);
      return b == t->body ? t : mk_abs(b, t->name);
    }
    default:
      return t;
  }
}

namespace {

Goal goal_open_rec(const Goal& g, const std::vector<Term>& vals, int depth) {
  switch (g->tag) {
    case GoalTag::Tt:
    case GoalTag::Ff:
      return g;
    case GoalTag::Eq: {
      Term a = open_term_frame(g->t1, vals, depth);
      Term b = open_term_frame(g->t2, vals, depth);
      return (a == g->t1 && b == g->t2) ? g : mk_eq(a, b);
    }
    case GoalTag::Atom: {
      Term a = open_term_frame(g->t1, vals, depth);
      return a == g->t1 ? g : mk_atom(a);
    }
    case GoalTag::And:
    case GoalTag::Or: {
      Goal a = goal_open_rec(g->g1, vals, depth);
      Goal b = goal_open_rec(g->g2, vals, depth);
      if (a == g->g1 && b == g->g2) return g;
      return g->tag == GoalTag::And ? mk_and(a, b) : mk_or(a, b);
    }
    case GoalTag::Some:
    case GoalTag::All: {
      Goal b = goal_open_rec(g->g1, vals, depth + 1);
      if (b == g->g1) return g;
      return g->tag == GoalTag::Some ? mk_some(g->bname, b)
                                     : mk_all(g->bname, b);
    }
    case GoalTag::ImpI:
    case GoalTag::ImpL: {
      Term a = open_term_frame(g->t1, vals, depth);
      Goal b = goal_open_rec(g->g1, vals, depth);
      if (a == g->t1 && b == g->g1) return g;
      return g->tag == GoalTag::ImpI ? mk_impi(a, b) : mk_impl(a, b);
    }
    case GoalTag::Bang: {
      Goal b = goal_open_rec(g->g1, vals, depth);
      return b == g->g1 ? g : mk_bang(b);
    }
  }
  return g;
}

}  // namespace

Goal goal_open(const Goal& g, const std::vector<Term>& vals) {
  return goal_open_rec(g, vals, 0);
}

Goal goal_open(const Goal& g, const Term& val) {
  return goal_open_rec(g, std::vector<Term>{val}, 0);
}

std::pair<Term, std::vector<Term>> raw_spine(Term t) {
  std::vector<Term> args;
  while (t->tag == Tag::App) {
    args.push_back(t->arg);
    t = t->fn;
  }
  std::reverse(args.begin(), args.end());
  return {t, std::move(args)};
}

Term close_fvars_term(const Term& t, const std::map<std::string, int>& offsets,
                      int depth) {
  switch (t->tag) {
    case Tag::FVar: {
      auto it = offsets.find(t->name);
      if (it == offsets.end())
        throw ParseError("unbound variable " + t->name);
      return mk_bound(depth + it->second);
    }
    case Tag::App: {
      Term f = close_fvars_term(t->fn, offsets, depth);
      Term a = close_fvars_term(t->arg, offsets, depth);
      return (f == t->fn && a == t->arg) ? t : mk_app(f, a);
    }
    case Tag::Abs: {
      Term b = close_fvars_term(t->body, offsets, depth + 1);
      return b == t->body ? t : mk_abs(b, t->name);
    }
    default:
      return t;
  }
}

Goal close_fvars_goal(const Goal& g, const std::map<std::string, int>& offsets,
                      int depth) {
  switch (g->tag) {
    case GoalTag::Tt:
    case GoalTag::Ff:
      return g;
    case GoalTag::Eq:
      return mk_eq(close_fvars_term(g->t1, offsets, depth),
                   close_fvars_term(g->t2, offsets, depth));
    case GoalTag::Atom:
      return mk_atom(close_fvars_term(g->t1, offsets, depth));
    case GoalTag::And:
      return mk_and(close_fvars_goal(g->g1, offsets, depth),
                    close_fvars_goal(g->g2, offsets, depth));
    case GoalTag::Or:
      return mk_or(close_fvars_goal(g->g1, offsets, depth),
                   close_fvars_goal(g->g2, offsets, depth));
    case GoalTag::Some:
      return mk_some(g->bname, close_fvars_goal(g->g1, offsets, depth + 1));
    case GoalTag::All:
      return mk_all(g->bname, close_fvars_goal(g->g1, offsets, depth + 1));
    case GoalTag::ImpI:
      return mk_impi(close_fvars_term(g->t1, offsets, depth),
                     close_fvars_goal(g->g1, offsets, depth));
    case GoalTag::ImpL:
      return mk_impl(close_fvars_term(g->t1, offsets, depth),
                     close_fvars_goal(g->g1, offsets, depth));
    case GoalTag::Bang:
      return mk_bang(close_fvars_goal(g->g1, offsets, depth));
  }
  return g;
}

const CompiledPred* Program::find_pred(const std::string& name) const {
  auto it = preds.find(name);
  return it == preds.end() ? nullptr : &it->second;
}

const PropertySpec* Program::find_prop(const std::string& name) const {
  for (const auto& p : props)
    if (p.name == name) return &p;
  return nullptr;
}

namespace {

// One clause as an existentially closed disjunct over the head frame.
Goal build_disjunct(const Clause& c, int arity) {
  auto [head, hargs] = raw_spine(c.head);
  std::map<std::string, int> renamed;  // var -> head slot
  std::vector<bool> dropped(arity, false);
  for (int i = 0; i < arity; ++i) {
    const Term& t = hargs[i];
    if (t->tag == Tag::FVar && !renamed.count(t->name)) {
      renamed[t->name] = i;
      dropped[i] = true;
    }
  }
  std::vector<std::string> zs;
  for (const auto& v : c.vars)
    if (!renamed.count(v)) zs.push_back(v);
  int k = (int)zs.size();
  // Offsets: the j-th existential binder (outermost first) sits at
  // k - 1 - j; head frame slot s sits above all of them at k + s.
  std::map<std::string, int> offsets;
  for (int j = 0; j < k; ++j) offsets[zs[j]] = k - 1 - j;
  for (const auto& [v, s] : renamed) offsets[v] = k + s;
  std::vector<Goal> conj;
  for (int i = 0; i < arity; ++i)
    if (!dropped[i])
      conj.push_back(
          mk_eq(mk_bound(k + i), close_fvars_term(hargs[i], offsets, 0)));
  conj.push_back(close_fvars_goal(c.body, offsets, 0));
  Goal d = conj.back();
  for (int i = (int)conj.size() - 2; i >= 0; --i) d = mk_and(conj[i], d);
  for (int j = k - 1; j >= 0; --j) d = mk_some(zs[j], d);
  return d;
}

}  // namespace

Program compile(const SurfaceProgram& sp) {
  Program p;
  p.mode = sp.mode;
  p.ctors = sp.ctors;
  p.props = sp.props;
  p.axioms = sp.axioms;
  p.clauses = sp.clauses;

  // Group clauses by predicate, keeping file order.
  std::vector<std::string> order;
  std::map<std::string, std::vector<const Clause*>> groups;
  std::map<std::string, int> arities;
  for (const auto& c : sp.clauses) {
    auto [head, hargs] = raw_spine(c.head);
    const std::string& name = head->name;
    auto [it, fresh] = arities.emplace(name, (int)hargs.size());
    if (fresh)
      order.push_back(name);
    else if (it->second != (int)hargs.size())
      throw ArityError("predicate " + name + " used with differing arities",
                       c.line);
    groups[name].push_back(&c);
  }
  for (const auto& [name, arity] : sp.hyp_preds) {
    if (auto it = arities.find(name); it != arities.end()) {
      if (it->second != arity)
        throw ArityError("predicate " + name + " used with differing arities");
    }
  }

  for (const auto& name : order) {
    CompiledPred cp;
    cp.name = name;
    cp.arity = arities[name];
    cp.ndisjuncts = (int)groups[name].size();
    Goal body = mk_ff();
    for (auto it = groups[name].rbegin(); it != groups[name].rend(); ++it)
      body = mk_or(build_disjunct(**it, cp.arity), body);
    cp.body = body;
    p.preds.emplace(name, std::move(cp));
  }

  // Predicates that only ever appear as hypothesis antecedents still need
  // an entry: backchaining on them fails, only hypotheses can prove them.
  for (const auto& [name, arity] : sp.hyp_preds) {
    if (p.preds.count(name)) continue;
    CompiledPred cp;
    cp.name = name;
    cp.arity = arity;
    cp.body = mk_ff();
    cp.ndisjuncts = 0;
    cp.defined = false;
    p.preds.emplace(name, std::move(cp));
  }

  for (const auto& [name, ws] : sp.weights) {
    auto it = p.preds.find(name);
    if (it == p.preds.end())
      throw UnboundPredicate("weights for unknown predicate " + name);
    if ((int)ws.size() != it->second.ndisjuncts)
      throw ParseError("weights for " + name + " list " +
                       std::to_string(ws.size()) + " entries but it has " +
                       std::to_string(it->second.ndisjuncts) + " clauses");
    for (long long w : ws)
      if (w < 1) throw ParseError("weights for " + name + " must be positive");
    it->second.weights = ws;
  }
  return p;
}

std::pair<Term, Goal> instantiate_clause(Store& st, const Clause& c) {
  // Compile-free instantiation: route through the FVar-closure machinery
  // with a frame of fresh metavariables.
  std::map<std::string, int> offsets;
  std::vector<Term> vals;
  for (const auto& v : c.vars) {
    offsets[v] = (int)vals.size();
    vals.push_back(st.fresh_meta(v));
  }
  // Slot s at offset s means Bound(depth + s); open the frame afterwards.
  Term head = open_term_frame(close_fvars_term(c.head, offsets, 0), vals, 0);
  Goal body = goal_open(close_fvars_goal(c.body, offsets, 0), vals);
  return {head, body};
}

}  // namespace pbt
