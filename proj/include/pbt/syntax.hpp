#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pbt/terms.hpp"

namespace pbt {

// Goals of the specification logic. Binders introduced by Some/All extend
// the same de Bruijn index space terms use, so a term nested under k goal
// binders and j term abstractions refers to the outermost goal binder with
// index k + j - 1.
enum class GoalTag { Tt, Ff, Eq, And, Or, Some, All, ImpI, ImpL, Bang, Atom };

struct GoalNode;
using Goal = std::shared_ptr<const GoalNode>;

struct GoalNode {
  GoalTag tag;
  Term t1, t2;        // Eq: lhs/rhs; Atom: the atom; ImpI/ImpL: antecedent
  Goal g1, g2;        // And/Or: both; Some/All/ImpI/ImpL/Bang: g1
  std::string bname;  // Some/All binder display name
};

Goal mk_tt();
Goal mk_ff();
Goal mk_eq(Term a, Term b);
Goal mk_and(Goal a, Goal b);
Goal mk_or(Goal a, Goal b);
Goal mk_some(std::string bname, Goal body);
Goal mk_all(std::string bname, Goal body);
Goal mk_impi(Term antecedent, Goal body);  // A => G   (unrestricted)
Goal mk_impl(Term antecedent, Goal body);  // A -o G   (must be consumed)
Goal mk_bang(Goal body);                   // ! G
Goal mk_atom(Term t);

// Substitute locally closed `vals` for the outermost |vals| binder indices
// of a goal (slot s -> vals[s]) or term.
Goal goal_open(const Goal& g, const std::vector<Term>& vals);
Goal goal_open(const Goal& g, const Term& val);
Term open_term_frame(const Term& t, const std::vector<Term>& vals, int cutoff);

// Parse-time clause, with free capitals kept as FVar terms.
struct Clause {
  Term head;                      // atom, constant-headed
  Goal body;                      // tt for facts
  std::vector<std::string> vars;  // first-occurrence order
  int line = 0;
};

struct PropertySpec {
  std::string name;
  std::vector<std::string> vars;  // shared frame across the three parts
  Goal gen, when, then;           // frame-closed; when == nullptr if absent
  int line = 0;
};

enum class Mode { Horn, HH, Linear };

struct CompiledPred {
  std::string name;
  int arity = 0;
  Goal body = nullptr;  // frame-closed right-nested disjunction ending in ff
  int ndisjuncts = 0;
  std::vector<long long> weights;  // empty = uniform
  bool defined = true;  // false: appears only as a hypothesis antecedent
};

struct SurfaceProgram {
  Mode mode = Mode::HH;
  std::map<std::string, int> ctors;
  std::vector<Clause> clauses;
  std::vector<PropertySpec> props;
  std::set<std::string> axioms;
  std::map<std::string, int> hyp_preds;  // antecedent-only name -> arity
  std::map<std::string, std::vector<long long>> weights;
};

struct Program {
  Mode mode = Mode::HH;
  std::map<std::string, int> ctors;
  std::map<std::string, CompiledPred> preds;
  std::vector<PropertySpec> props;
  std::set<std::string> axioms;
  std::vector<Clause> clauses;  // surface form, kept for reference tooling

  const CompiledPred* find_pred(const std::string& name) const;
  const PropertySpec* find_prop(const std::string& name) const;
};

// Clause-to-definition completion: one definition per predicate whose body
// is  D1 or (D2 or (... or ff)), each Di existentially closing one clause
// with explicit head equations. Equations `slot = X` for a variable's first
// head occurrence are eliminated by renaming X to that slot.
Program compile(const SurfaceProgram& sp);

// Replace FVars by fresh metavariables (one per clause variable).
std::pair<Term, Goal> instantiate_clause(Store& st, const Clause& c);

// FVar closure used by compile() and the parser's property conversion:
// an FVar with offset o at binder depth d becomes Bound(d + o).
Term close_fvars_term(const Term& t, const std::map<std::string, int>& offsets,
                      int depth);
Goal close_fvars_goal(const Goal& g, const std::map<std::string, int>& offsets,
                      int depth);

// Pure structural spine for parse-time terms (no store involved).
std::pair<Term, std::vector<Term>> raw_spine(Term t);

}  // namespace pbt
