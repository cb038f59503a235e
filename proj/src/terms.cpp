#include "pbt/terms.hpp"

#include <algorithm>
#include <cassert>

namespace pbt {

namespace {

Term make(Tag tag) {
  auto n = std::make_shared<TermNode>();
  n->tag = tag;
  return n;
}

// Add `d` to every loose Bound index >= cutoff.
Term shift_at(const Term& t, int d, int cutoff) {
  switch (t->tag) {
    case Tag::Bound:
      return t->index >= cutoff ? mk_bound(t->index + d) : t;
    case Tag::App: {
      Term f = shift_at(t->fn, d, cutoff);
      Term a = shift_at(t->arg, d, cutoff);
      return (f == t->fn && a == t->arg) ? t : mk_app(f, a);
    }
    case Tag::Abs: {
      Term b = shift_at(t->body, d, cutoff + 1);
      return b == t->body ? t : mk_abs(b, t->name);
    }
    default:
      return t;
  }
}

// Substitute `v` for Bound(j), decrementing indices above j.
Term subst_at(const Term& t, const Term& v, int j) {
  switch (t->tag) {
    case Tag::Bound:
      if (t->index == j) return j == 0 ? v : shift_at(v, j, 0);
      return t->index > j ? mk_bound(t->index - 1) : t;
    case Tag::App: {
      Term f = subst_at(t->fn, v, j);
      Term a = subst_at(t->arg, v, j);
      return (f == t->fn && a == t->arg) ? t : mk_app(f, a);
    }
    case Tag::Abs: {
      Term b = subst_at(t->body, v, j + 1);
      return b == t->body ? t : mk_abs(b, t->name);
    }
    default:
      return t;
  }
}

}  // namespace

Term mk_const(std::string name) {
  Term t = make(Tag::Const);
  const_cast<TermNode*>(t.get())->name = std::move(name);
  return t;
}

Term mk_int(long long v) {
  Term t = make(Tag::Int);
  const_cast<TermNode*>(t.get())->ival = v;
  return t;
}

Term mk_app(Term fn, Term arg) {
  Term t = make(Tag::App);
  auto* n = const_cast<TermNode*>(t.get());
  n->fn = std::move(fn);
  n->arg = std::move(arg);
  return t;
}

Term mk_apps(Term head, const std::vector<Term>& args) {
  Term t = std::move(head);
  for (const auto& a : args) t = mk_app(t, a);
  return t;
}

Term mk_abs(Term body, std::string hint) {
  Term t = make(Tag::Abs);
  auto* n = const_cast<TermNode*>(t.get());
  n->body = std::move(body);
  n->name = std::move(hint);
  return t;
}

Term mk_bound(int index) {
  Term t = make(Tag::Bound);
  const_cast<TermNode*>(t.get())->index = index;
  return t;
}

Term mk_fvar(std::string name) {
  Term t = make(Tag::FVar);
  const_cast<TermNode*>(t.get())->name = std::move(name);
  return t;
}

Term open_term(const Term& body, const Term& value) {
  return subst_at(body, value, 0);
}

Term Store::fresh_meta(std::string hint) {
  return fresh_meta_at(stamp_, std::move(hint));
}

Term Store::fresh_meta_at(int level, std::string hint) {
  Term t = make(Tag::Meta);
  auto* n = const_cast<TermNode*>(t.get());
  n->id = ++next_id_;
  n->level = level;
  n->name = std::move(hint);
  return t;
}

Term Store::fresh_eigen(std::string hint) {
  Term t = make(Tag::Eigen);
  auto* n = const_cast<TermNode*>(t.get());
  n->id = ++next_id_;
  n->level = ++stamp_;
  n->name = std::move(hint);
  return t;
}

void Store::undo_to(size_t m) {
  while (trail_.size() > m) {
    trail_.back()->binding = nullptr;
    trail_.pop_back();
  }
}

void Store::bind(const Term& meta, Term value) {
  assert(meta->tag == Tag::Meta && !meta->binding);
  meta->binding = std::move(value);
  trail_.push_back(meta);
}

Term Store::whnf(Term t) const {
  for (;;) {
    if (t->tag == Tag::Meta && t->binding) {
      t = t->binding;
      continue;
    }
    if (t->tag == Tag::App) {
      Term f = whnf(t->fn);
      if (f->tag == Tag::Abs) {
        t = open_term(f->body, t->arg);
        continue;
      }
      return f == t->fn ? t : mk_app(f, t->arg);
    }
    return t;
  }
}

Term Store::resolve(Term t) const {
  t = whnf(t);
  switch (t->tag) {
    case Tag::App: {
      Term f = resolve(t->fn);
      Term a = resolve(t->arg);
      return (f == t->fn && a == t->arg) ? t : mk_app(f, a);
    }
    case Tag::Abs: {
      Term b = resolve(t->body);
      return b == t->body ? t : mk_abs(b, t->name);
    }
    default:
      return t;
  }
}

bool Store::has_meta(const Term& t0) const {
  Term t = whnf(t0);
  switch (t->tag) {
    case Tag::Meta:
      return true;
    case Tag::App:
      return has_meta(t->fn) || has_meta(t->arg);
    case Tag::Abs:
      return has_meta(t->body);
    default:
      return false;
  }
}

bool Store::is_ground(const Term& t0) const {
  Term t = whnf(t0);
  switch (t->tag) {
    case Tag::Meta:
    case Tag::Eigen:
    case Tag::FVar:
      return false;
    case Tag::App:
      return is_ground(t->fn) && is_ground(t->arg);
    case Tag::Abs:
      return is_ground(t->body);
    default:
      return true;
  }
}

namespace {

int max_eigen_level(const Store& st, const Term& t0) {
  Term t = st.whnf(t0);
  switch (t->tag) {
    case Tag::Eigen:
      return t->level;
    case Tag::App:
      return std::max(max_eigen_level(st, t->fn), max_eigen_level(st, t->arg));
    case Tag::Abs:
      return max_eigen_level(st, t->body);
    default:
      return 0;
  }
}

}  // namespace

bool Store::audit_scope() const {
  for (const auto& m : trail_) {
    if (!m->binding) continue;
    if (max_eigen_level(*this, m->binding) > m->level) return false;
  }
  return true;
}

bool term_eq(const Store& st, const Term& a0, const Term& b0) {
  Term a = st.whnf(a0);
  Term b = st.whnf(b0);
  if (a == b) return true;
  if (a->tag != b->tag) return false;
  switch (a->tag) {
    case Tag::Meta:
    case Tag::Eigen:
      return a->id == b->id;
    case Tag::Const:
    case Tag::FVar:
      return a->name == b->name;
    case Tag::Int:
      return a->ival == b->ival;
    case Tag::Bound:
      return a->index == b->index;
    case Tag::App:
      return term_eq(st, a->fn, b->fn) && term_eq(st, a->arg, b->arg);
    case Tag::Abs:
      return term_eq(st, a->body, b->body);
  }
  return false;
}

std::pair<Term, std::vector<Term>> spine(const Store& st, Term t) {
  std::vector<Term> args;
  t = st.whnf(t);
  while (t->tag == Tag::App) {
    args.push_back(t->arg);
    t = st.whnf(t->fn);
  }
  std::reverse(args.begin(), args.end());
  return {t, std::move(args)};
}

bool mentions_eigen(const Store& st, const Term& t0, const Term& e) {
  Term t = st.whnf(t0);
  switch (t->tag) {
    case Tag::Eigen:
      return t->id == e->id;
    case Tag::App:
      return mentions_eigen(st, t->fn, e) || mentions_eigen(st, t->arg, e);
    case Tag::Abs:
      return mentions_eigen(st, t->body, e);
    default:
      return false;
  }
}

namespace {

void add_unique(const Store& st, std::vector<Term>& out, const Term& t) {
  for (const auto& u : out)
    if (term_eq(st, u, t)) return;
  out.push_back(t);
}

void collect_subterms(Store& st, const Term& t0, std::vector<Term>& out) {
  Term t = st.resolve(t0);
  add_unique(st, out, t);
  auto [head, args] = spine(st, t);
  if (!args.empty()) {
    for (const auto& a : args) collect_subterms(st, a, out);
    return;
  }
  if (t->tag == Tag::Abs) {
    Term e = st.fresh_eigen("sub");
    std::vector<Term> inner;
    collect_subterms(st, open_term(t->body, e), inner);
    for (const auto& c : inner)
      if (!mentions_eigen(st, c, e)) add_unique(st, out, c);
  }
}

}  // namespace

std::vector<Term> all_subterms(Store& st, const Term& t) {
  std::vector<Term> out;
  collect_subterms(st, t, out);
  return out;
}

bool subterm(Store& st, const Term& s, const Term& t) {
  for (const auto& c : all_subterms(st, t))
    if (term_eq(st, s, c)) return true;
  return false;
}

bool proper_subterm(Store& st, const Term& s, const Term& t) {
  auto subs = all_subterms(st, t);
  for (size_t i = 1; i < subs.size(); ++i)
    if (term_eq(st, s, subs[i])) return true;
  return false;
}

std::vector<Term> prune_subsumed(Store& st, const std::vector<Term>& items) {
  std::vector<Term> out;
  for (size_t i = 0; i < items.size(); ++i) {
    bool drop = false;
    for (size_t j = 0; j < i && !drop; ++j)
      if (term_eq(st, items[j], items[i])) drop = true;
    for (size_t j = 0; j < items.size() && !drop; ++j)
      if (i != j && proper_subterm(st, items[i], items[j])) drop = true;
    if (!drop) out.push_back(items[i]);
  }
  return out;
}

}  // namespace pbt
