#include "doctest.h"
#include "pbt/terms.hpp"

using namespace pbt;

namespace {

Term app2(const Term& f, const Term& a, const Term& b) {
  return mk_app(mk_app(f, a), b);
}

}  // namespace

TEST_CASE("whnf chases bindings and reduces head redexes") {
  Store st;
  Term f = mk_const("f");
  Term m = st.fresh_meta("M");
  st.bind(m, mk_app(f, mk_int(1)));
  Term w = st.whnf(m);
  CHECK(w->tag == Tag::App);

  // (x\ f x x) 3  ~~>  f 3 3
  Term body = app2(f, mk_bound(0), mk_bound(0));
  Term redex = mk_app(mk_abs(body), mk_int(3));
  Term r = st.whnf(redex);
  auto [h, args] = spine(st, r);
  CHECK(h->name == "f");
  REQUIRE(args.size() == 2);
  CHECK(st.whnf(args[0])->ival == 3);
}

TEST_CASE("resolve rebuilds deeply so values survive undo") {
  Store st;
  Term m = st.fresh_meta("M");
  Term t = app2(mk_const("pair"), m, mk_int(7));
  auto mark = st.mark();
  st.bind(m, mk_const("a"));
  Term deep = st.resolve(t);
  st.undo_to(mark);
  // the resolved copy still shows the binding, the original does not
  auto [h1, a1] = spine(st, deep);
  CHECK(st.whnf(a1[0])->name == "a");
  CHECK(st.whnf(m)->tag == Tag::Meta);
}

TEST_CASE("undo_to removes exactly the bindings after the mark") {
  Store st;
  Term m1 = st.fresh_meta(), m2 = st.fresh_meta();
  st.bind(m1, mk_int(1));
  auto mark = st.mark();
  st.bind(m2, mk_int(2));
  st.undo_to(mark);
  CHECK(st.whnf(m1)->ival == 1);
  CHECK(st.whnf(m2)->tag == Tag::Meta);
}

TEST_CASE("term_eq is alpha-equality modulo bindings") {
  Store st;
  // x\ y\ x  ==  a\ b\ a   (same de Bruijn skeleton)
  Term k1 = mk_abs(mk_abs(mk_bound(1)));
  Term k2 = mk_abs(mk_abs(mk_bound(1), "b"), "a");
  CHECK(term_eq(st, k1, k2));
  Term flip = mk_abs(mk_abs(mk_bound(0)));
  CHECK_FALSE(term_eq(st, k1, flip));

  Term m = st.fresh_meta();
  st.bind(m, k1);
  CHECK(term_eq(st, m, k2));
}

TEST_CASE("open_term substitutes the nearest binder") {
  Store st;
  // (x\ f x (y\ x)) @ c
  Term body = app2(mk_const("f"), mk_bound(0), mk_abs(mk_bound(1)));
  Term opened = open_term(body, mk_const("c"));
  auto [h, args] = spine(st, opened);
  CHECK(st.whnf(args[0])->name == "c");
  Term inner = st.whnf(args[1]);
  REQUIRE(inner->tag == Tag::Abs);
  CHECK(st.whnf(inner->body)->name == "c");
}

TEST_CASE("all_subterms walks spine arguments, not bare heads") {
  Store st;
  Term t = app2(mk_const("g"), mk_int(1), mk_app(mk_const("h"), mk_int(2)));
  auto subs = all_subterms(st, t);
  // t, 1, h 2, 2 — but not the bare g or h
  CHECK(subs.size() == 4);
  CHECK(subterm(st, mk_int(2), t));
  CHECK(proper_subterm(st, mk_int(2), t));
  CHECK_FALSE(proper_subterm(st, t, t));
  CHECK(subterm(st, t, t));
  bool bare_head = false;
  for (const auto& s : subs)
    if (st.whnf(s)->tag == Tag::Const && st.whnf(s)->name == "h")
      bare_head = true;
  CHECK_FALSE(bare_head);
}

TEST_CASE("subterms under binders that capture are dropped") {
  Store st;
  // lam (x\ f x (c)) : candidates mentioning x are not closed subterms
  Term body = app2(mk_const("f"), mk_bound(0), mk_const("c"));
  Term t = mk_app(mk_const("lam"), mk_abs(body));
  auto subs = all_subterms(st, t);
  bool has_c = false, has_open = false;
  for (const auto& s : subs) {
    if (term_eq(st, s, mk_const("c"))) has_c = true;
    if (st.whnf(s)->tag == Tag::Eigen) has_open = true;
  }
  CHECK(has_c);
  CHECK_FALSE(has_open);
}

TEST_CASE("prune_subsumed keeps only maximal items") {
  Store st;
  Term small = mk_int(2);
  Term big = app2(mk_const("g"), mk_int(1), small);
  auto pruned = prune_subsumed(st, {small, big, small, big});
  REQUIRE(pruned.size() == 1);
  CHECK(term_eq(st, pruned[0], big));
}

TEST_CASE("scope audit holds after eigen-scoped binding") {
  Store st;
  Term m = st.fresh_meta();     // older meta
  Term e = st.fresh_eigen();    // newer eigen
  CHECK(m->level < e->level);
  st.bind(m, mk_const("ok"));   // fine: no eigen mentioned
  CHECK(st.audit_scope());
}
