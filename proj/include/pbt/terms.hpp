#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace pbt {

// Lambda-tree term syntax. Object-level binders are meta-level abstractions
// (de Bruijn indices internally); substitution is application + beta.
//
//   Meta   unification variable, carries a scope level (timestamp)
//   Eigen  eigenvariable introduced by a universal goal, carries a level
//   Const  declared constructor / predicate / nullary certificate head
//   Int    integer literal
//   App    application (left-spined)
//   Abs    abstraction; body uses Bound(0) for the nearest binder
//   Bound  de Bruijn index
//   FVar   parse-time free variable (capital identifier); never reaches the
//          engine — instantiated to fresh Metas or frame slots first
enum class Tag { Meta, Eigen, Const, Int, App, Abs, Bound, FVar };

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

struct TermNode {
  Tag tag;
  int id = 0;          // Meta/Eigen identity
  int level = 0;       // Meta/Eigen scope timestamp
  long long ival = 0;  // Int
  int index = 0;       // Bound
  std::string name;    // Const/FVar name; Meta/Eigen/Abs display hint
  Term fn, arg;        // App
  Term body;           // Abs
  mutable Term binding;  // Meta only; written through Store::bind
};

Term mk_const(std::string name);
Term mk_int(long long v);
Term mk_app(Term fn, Term arg);
Term mk_apps(Term head, const std::vector<Term>& args);
Term mk_abs(Term body, std::string hint = "");
Term mk_bound(int index);
Term mk_fvar(std::string name);

// Substitute `value` for the outermost binder of an Abs body.
Term open_term(const Term& body, const Term& value);

// Central mutable state: fresh-name supply, scope timestamps, and the
// binding trail used to undo speculative unifications on backtracking.
class Store {
 public:
  Term fresh_meta(std::string hint = "");   // level = current timestamp
  Term fresh_meta_at(int level, std::string hint = "");
  Term fresh_eigen(std::string hint = "");  // level = ++timestamp

  int stamp() const { return stamp_; }

  size_t mark() const { return trail_.size(); }
  void undo_to(size_t m);
  void bind(const Term& meta, Term value);

  // Weak head normal form: chase Meta bindings, reduce head beta redexes.
  Term whnf(Term t) const;
  // Deep normal form: whnf everywhere, rebuilding only where needed.
  Term resolve(Term t) const;

  bool has_meta(const Term& t) const;   // any unbound Meta after resolve
  bool is_ground(const Term& t) const;  // no Meta and no Eigen

  // Scope invariant: a Meta's binding may only mention Eigens that are
  // older than the Meta (level <= Meta level). Returns false on violation.
  bool audit_scope() const;

 private:
  int stamp_ = 0;
  int next_id_ = 0;
  std::vector<Term> trail_;  // bound Metas, in binding order
};

// Structural equality modulo bindings and beta (alpha is free with de
// Bruijn). No eta: an Abs never equals a non-Abs.
bool term_eq(const Store& st, const Term& a, const Term& b);

// whnf the application spine: returns (head, args). Head is whnf'd; the
// args are left untouched.
std::pair<Term, std::vector<Term>> spine(const Store& st, Term t);

// Does Eigen `e` occur in t (after resolution)?
bool mentions_eigen(const Store& st, const Term& t, const Term& e);

// Subterms by spine-argument descent: a term is a subterm of itself, and
// every subterm of an application's arguments is a subterm; the bare head
// of an application is not. Abstractions are opened with a fresh
// eigenvariable and candidates mentioning the opener are dropped.
// Result is deduplicated, outermost first.
std::vector<Term> all_subterms(Store& st, const Term& t);
bool subterm(Store& st, const Term& s, const Term& t);
bool proper_subterm(Store& st, const Term& s, const Term& t);

// Drop items that are proper subterms of another item (and duplicates),
// keeping first occurrences in order.
std::vector<Term> prune_subsumed(Store& st, const std::vector<Term>& items);

}  // namespace pbt
