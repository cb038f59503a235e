#include <string>

#include "doctest.h"
#include "pbt/errors.hpp"
#include "pbt/parser.hpp"
#include "pbt/printer.hpp"
#include "pbt/syntax.hpp"

using namespace pbt;

namespace {

Program compile_src(const std::string& src) {
  return compile(parse_program(src, "test"));
}

const char* kMini = R"(
mode horn.
ctor z 0.
ctor s 1.
isnat z.
isnat (s N) :- isnat N.
weights isnat [1, 3].
prop nats_small :=
  gen: isnat N.
  then: isnat N.
)";

}  // namespace

TEST_CASE("a small program compiles with clauses merged per predicate") {
  Program p = compile_src(kMini);
  const CompiledPred* isnat = p.find_pred("isnat");
  REQUIRE(isnat != nullptr);
  CHECK(isnat->arity == 1);
  CHECK(isnat->ndisjuncts == 2);
  REQUIRE(isnat->weights.size() == 2);
  CHECK(isnat->weights[0] == 1);
  CHECK(isnat->weights[1] == 3);
  CHECK(isnat->defined);

  const PropertySpec* pr = p.find_prop("nats_small");
  REQUIRE(pr != nullptr);
  CHECK(pr->vars == std::vector<std::string>{"N"});
  CHECK(pr->when == nullptr);
}

TEST_CASE("every corpus file parses and compiles") {
  const char* files[] = {"lists.sl",   "lambda.sl",       "eta.sl",
                         "perm.sl",    "linear_terms.sl", "counter.sl"};
  for (const char* f : files) {
    CAPTURE(f);
    Program p = compile(parse_program_file(std::string(PBT_CORPUS_DIR) + "/" + f));
    CHECK(!p.preds.empty());
  }
}

TEST_CASE("modes gate the connectives") {
  CHECK_THROWS_AS(compile_src("mode horn.\nctor c 0.\np :- (q c) => (r c).\n"
                              "q X.\nr X.\np."),
                  ParseError);
  // hh allows => but not -o
  CHECK_NOTHROW(compile_src("mode hh.\nctor c 0.\nq X.\np :- (q c) => (q c)."));
  CHECK_THROWS_AS(compile_src("mode hh.\nctor c 0.\nq X.\np :- (q c) -o (q c)."),
                  ParseError);
  CHECK_NOTHROW(
      compile_src("mode linear.\nctor c 0.\nq X.\np :- (q c) -o (q c)."));
}

TEST_CASE("unknown predicates and arity clashes are rejected") {
  CHECK_THROWS_AS(compile_src("mode horn.\np :- q."), UnboundPredicate);
  CHECK_THROWS_AS(compile_src("mode horn.\nctor c 0.\np c.\np :- p."),
                  ArityError);
  CHECK_THROWS_AS(compile_src("mode horn.\nctor c 0.\np (c c)."), ArityError);
  // constructors cannot be goals
  CHECK_THROWS_AS(compile_src("mode horn.\nctor c 0.\np :- c."), ParseError);
}

TEST_CASE("weights must match the clause count") {
  CHECK_THROWS_AS(compile_src("mode horn.\nctor z 0.\nisnat z.\n"
                              "weights isnat [1, 2]."),
                  ParseError);
}

TEST_CASE("antecedent-only predicates become hypothesis-only") {
  Program p = compile_src(
      "mode linear.\nctor c 0.\np :- (res c) -o (use c).\nuse X :- res X.");
  const CompiledPred* res = p.find_pred("res");
  REQUIRE(res != nullptr);
  CHECK_FALSE(res->defined);
  CHECK(res->arity == 1);
}

TEST_CASE("parse_goal returns variables in first-use order") {
  Program p = compile_src(kMini);
  ParsedGoal g = parse_goal("isnat N, isnat M, N = M", p);
  CHECK(g.vars == std::vector<std::string>{"N", "M"});
  CHECK(g.goal->tag == GoalTag::And);
}

TEST_CASE("parse_term rejects free variables but accepts binders") {
  Program p = compile_src(kMini);
  CHECK_THROWS_AS(parse_term("s N", p), ParseError);
  Term t = parse_term("s (s z)", p);
  Store st;
  Printer pr(st, &p);
  CHECK(pr.term(t) == "s (s z)");
}

TEST_CASE("goal_open fills property frames") {
  Program p = compile_src(kMini);
  const PropertySpec* pr = p.find_prop("nats_small");
  REQUIRE(pr);
  Store st;
  Term m = st.fresh_meta("N");
  Goal g = goal_open(pr->gen, {m});
  REQUIRE(g->tag == GoalTag::Atom);
  auto [h, args] = spine(st, g->t1);
  CHECK(h->name == "isnat");
  REQUIRE(args.size() == 1);
  CHECK(st.whnf(args[0])->tag == Tag::Meta);
}

TEST_CASE("lambda-tree clauses bind through the binder") {
  Program p = compile_src(
      "mode hh.\nctor lam 1.\nis_exp (lam M) :- pi x\\ is_exp x => is_exp (M x).");
  const CompiledPred* pe = p.find_pred("is_exp");
  REQUIRE(pe != nullptr);
  CHECK(pe->ndisjuncts == 1);
}

TEST_CASE("duplicate declarations are rejected") {
  CHECK_THROWS_AS(compile_src("mode horn.\nctor c 0.\nctor c 1.\np c."),
                  ParseError);
  CHECK_THROWS_AS(compile_src("mode horn.\nmode hh.\nctor c 0.\np c."),
                  ParseError);
}
