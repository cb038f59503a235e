#include "doctest.h"
#include "pbt/errors.hpp"
#include "pbt/terms.hpp"
#include "pbt/unify.hpp"

using namespace pbt;

namespace {

Term app2(const Term& f, const Term& a, const Term& b) {
  return mk_app(mk_app(f, a), b);
}

}  // namespace

TEST_CASE("first-order unification binds and backtracks") {
  Store st;
  Term m = st.fresh_meta("M");
  Term t = app2(mk_const("f"), m, mk_int(2));
  Term u = app2(mk_const("f"), mk_int(1), mk_int(2));
  auto mark = st.mark();
  REQUIRE(unify(st, t, u));
  CHECK(st.whnf(m)->ival == 1);
  st.undo_to(mark);
  CHECK(st.whnf(m)->tag == Tag::Meta);

  // clash restores the store by itself
  Term v = app2(mk_const("g"), mk_int(1), mk_int(2));
  CHECK_FALSE(unify(st, t, v));
  CHECK(st.whnf(m)->tag == Tag::Meta);
}

TEST_CASE("occurs check rejects cyclic solutions") {
  Store st;
  Term m = st.fresh_meta();
  CHECK_FALSE(unify(st, m, mk_app(mk_const("s"), m)));
  CHECK(st.whnf(m)->tag == Tag::Meta);
}

TEST_CASE("pattern unification inverts distinct eigenvariables") {
  Store st;
  Term m = st.fresh_meta("M");
  Term e1 = st.fresh_eigen("a");
  Term e2 = st.fresh_eigen("b");
  // M a b = f b a   ~~>   M = x\ y\ f y x
  REQUIRE(unify(st, app2(m, e1, e2), app2(mk_const("f"), e2, e1)));
  Term sol = st.resolve(m);
  REQUIRE(sol->tag == Tag::Abs);
  Term expect = mk_abs(mk_abs(app2(mk_const("f"), mk_bound(0), mk_bound(1))));
  CHECK(term_eq(st, sol, expect));
}

TEST_CASE("an eigen out of the pattern's scope fails pruning-free cases") {
  Store st;
  Term m = st.fresh_meta("M");         // level L
  Term e = st.fresh_eigen("a");        // newer than M
  // M = f a would smuggle `a` into M's scope
  CHECK_FALSE(unify(st, m, mk_app(mk_const("f"), e)));
}

TEST_CASE("flex-flex with shared arguments keeps the intersection") {
  Store st;
  Term m = st.fresh_meta("M");
  Term n = st.fresh_meta("N");
  Term e1 = st.fresh_eigen("a");
  Term e2 = st.fresh_eigen("b");
  // M a b = N b a is solvable (both become constant functions or permuted)
  REQUIRE(unify(st, app2(m, e1, e2), app2(n, e2, e1)));
  // whatever the solution, instantiating both sides agrees
  CHECK(term_eq(st, st.resolve(app2(m, e1, e2)), st.resolve(app2(n, e2, e1))));
}

TEST_CASE("raising: newer meta applied to older eigen") {
  Store st;
  Term e = st.fresh_eigen("a");   // older
  Term m = st.fresh_meta("M");    // newer: e is in M's scope
  REQUIRE(unify(st, mk_app(mk_const("f"), e), mk_app(mk_const("f"), m)));
  CHECK(term_eq(st, st.resolve(m), e));
}

TEST_CASE("non-pattern problems throw instead of guessing") {
  Store st;
  Term m = st.fresh_meta("M");
  Term c = mk_const("c");
  // M c = c applies a meta to a constant: outside the pattern fragment
  CHECK_THROWS_AS(unify(st, mk_app(m, c), c), NonPatternProblem);
}

TEST_CASE("identical non-pattern subproblems unify verbatim") {
  Store st;
  Term m = st.fresh_meta("M");
  Term n = st.fresh_meta("N");
  Term bad = mk_app(m, mk_const("c"));  // non-pattern by itself
  // f (M c) = f (M c) carries the offending subterm through verbatim
  CHECK(unify(st, mk_app(mk_const("f"), bad), mk_app(mk_const("f"), bad)));
  // and N = M c still binds N without inspecting the application
  CHECK(unify(st, n, bad));
  CHECK(term_eq(st, st.resolve(n), st.resolve(bad)));
}

TEST_CASE("abstractions unify pointwise") {
  Store st;
  Term m = st.fresh_meta("M");
  // x\ f x M  =  x\ f x 3
  Term l = mk_abs(app2(mk_const("f"), mk_bound(0), m));
  Term r = mk_abs(app2(mk_const("f"), mk_bound(0), mk_int(3)));
  REQUIRE(unify(st, l, r));
  CHECK(st.whnf(m)->ival == 3);
}
