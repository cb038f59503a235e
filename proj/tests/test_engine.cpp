#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "pbt/engine.hpp"
#include "pbt/errors.hpp"
#include "pbt/parser.hpp"
#include "pbt/printer.hpp"
#include "pbt/syntax.hpp"

using namespace pbt;

namespace {

Program load(const char* file) {
  return compile(parse_program_file(std::string(PBT_CORPUS_DIR) + "/" + file));
}

// All solutions of `src`, rendered as "X = t, Y = u" lines.
std::vector<std::string> solutions(Store& st, const Program& prog,
                                   const std::string& src,
                                   long long fuel = 1'000'000) {
  ParsedGoal pg = parse_goal(src, prog);
  auto mark = st.mark();
  std::vector<Term> metas;
  for (const auto& v : pg.vars) metas.push_back(st.fresh_meta(v));
  Goal g = goal_open(pg.goal, metas);
  FuelBudget budget{fuel};
  EngineOpts opts{&budget};
  std::vector<std::string> out;
  prove(st, prog, g, opts, [&] {
    Printer pr(st, &prog);
    std::string line;
    for (size_t i = 0; i < pg.vars.size(); ++i) {
      if (i) line += ", ";
      line += pg.vars[i] + " = " + pr.term(st.resolve(metas[i]));
    }
    out.push_back(line);
    return false;
  });
  st.undo_to(mark);
  return out;
}

bool provable(Store& st, const Program& prog, const std::string& src,
              long long fuel = 1'000'000) {
  ParsedGoal pg = parse_goal(src, prog);
  auto mark = st.mark();
  std::vector<Term> metas;
  for (const auto& v : pg.vars) metas.push_back(st.fresh_meta(v));
  Goal g = goal_open(pg.goal, metas);
  FuelBudget budget{fuel};
  EngineOpts opts{&budget};
  bool ok = prove(st, prog, g, opts, [] { return true; });
  st.undo_to(mark);
  return ok;
}

}  // namespace

TEST_CASE("horn search enumerates in clause order, oldest hypotheses first") {
  Store st;
  Program p = load("lists.sl");
  auto sols = solutions(st, p, "append L K (z :: (s z) :: nil)");
  REQUIRE(sols.size() == 3);
  // splits appear left-prefix first, per clause order
  CHECK(sols[0] == "L = nil, K = z :: (s z) :: nil");
  CHECK(sols[1] == "L = z :: nil, K = (s z) :: nil");
  CHECK(sols[2] == "L = z :: (s z) :: nil, K = nil");
}

TEST_CASE("accumulator and naive reversal agree") {
  Store st;
  Program p = load("lists.sl");
  auto a = solutions(st, p, "rev (z :: (s z) :: (s (s z)) :: nil) K");
  auto b = solutions(st, p, "reverse (z :: (s z) :: (s (s z)) :: nil) K");
  REQUIRE(a.size() == 1);
  CHECK(a == b);
}

TEST_CASE("hypothetical goals extend the context through pi") {
  Store st;
  Program p = load("lambda.sl");
  CHECK(provable(st, p, "is_exp (lam x\\ app x x)"));
  CHECK(provable(st, p, "is_exp (app (lam x\\ x) (lam x\\ x))"));
  // a variable escaping its binder is not an expression
  CHECK_FALSE(provable(st, p, "step (lam x\\ x) (lam y\\ lam x\\ x)"));
}

TEST_CASE("beta reduction steps where redexes exist") {
  Store st;
  Program p = load("lambda.sl");
  auto sols = solutions(st, p, "step (app (lam x\\ x) (lam y\\ y)) R");
  REQUIRE(!sols.empty());
  CHECK(sols[0] == "R = lam (x\\ x)");
  CHECK_FALSE(provable(st, p, "step (lam x\\ x) R"));
}

TEST_CASE("linear resources are consumed exactly once") {
  Store st;
  Program p = load("perm.sl");
  // loading [a] and unloading it twice is unprovable; zero times leaves junk
  CHECK(provable(st, p, "perm (z :: nil) (z :: nil)"));
  CHECK_FALSE(provable(st, p, "perm (z :: nil) (z :: z :: nil)"));
  CHECK_FALSE(provable(st, p, "perm (z :: nil) nil"));
}

TEST_CASE("unrestricted twin drops and duplicates") {
  Store st;
  Program p = load("perm.sl");
  CHECK(provable(st, p, "perm' (z :: nil) nil"));
  CHECK(provable(st, p, "perm' (z :: nil) (z :: z :: nil)"));
}

TEST_CASE("bang goals must not consume linear resources") {
  Store st;
  Program p = compile(parse_program(
      "mode linear.\nctor c 0.\nq :- (r c) -o ((! s) , (r c)).\n"
      "s.\nr X.\nt :- (r c) -o (! (r c)).",
      "inline"));
  CHECK(provable(st, p, "q"));
  // ! (r c) cannot consume the pending resource, and r has no program fact
  // matching c... it does (r X). But the resource must still be consumed:
  CHECK_FALSE(provable(st, p, "t"));
}

TEST_CASE("negation as failure is exception-safe and binding-free") {
  Store st;
  Program p = load("lists.sl");
  Goal g = parse_goal("isnat (s (s z))", p).goal;
  CHECK_FALSE(naf(st, p, g, 1000));  // provable, so naf fails
  Goal bad = parse_goal("nlist (s z)", p).goal;
  CHECK(naf(st, p, bad, 1000));

  // non-ground negation is an error, not a guess
  auto mark = st.mark();
  Term m = st.fresh_meta("X");
  Goal open_goal = goal_open(parse_goal("isnat X", p).goal, {m});
  CHECK_THROWS_AS(naf(st, p, open_goal, 1000), NonGroundNegation);
  st.undo_to(mark);

  // diverging searches surface as FuelExhausted, with no residue
  Program loop =
      compile(parse_program("mode horn.\nctor c 0.\np X :- p X.", "inline"));
  Goal lg = parse_goal("p c", loop).goal;
  auto m2 = st.mark();
  CHECK_THROWS_AS(naf(st, loop, lg, 500), FuelExhausted);
  CHECK(st.mark() == m2);
}

TEST_CASE("fuel exhaustion aborts runaway searches") {
  Store st;
  Program loop =
      compile(parse_program("mode horn.\nctor c 0.\np X :- p X.", "inline"));
  CHECK_THROWS_AS(provable(st, loop, "p c", 200), FuelExhausted);
}

TEST_CASE("kont true stops with bindings in place; false backtracks all") {
  Store st;
  Program p = load("lists.sl");
  ParsedGoal pg = parse_goal("isnat N", p);
  Term m = st.fresh_meta("N");
  Goal g = goal_open(pg.goal, {m});
  FuelBudget budget{1000};
  EngineOpts opts{&budget};
  int calls = 0;
  bool stopped = prove(st, p, g, opts, [&] { return ++calls == 3; });
  CHECK(stopped);
  CHECK(calls == 3);
  Printer pr(st, &p);
  CHECK(pr.term(st.resolve(m)) == "s (s z)");  // third nat, still bound
}

TEST_CASE("eval in the counter program threads state left to right") {
  Store st;
  Program p = load("counter.sl");
  auto cbn = solutions(st, p, "eval_cbn (app (lam w\\ get) (set (- 1))) V");
  auto cbv = solutions(st, p, "eval_cbv (app (lam w\\ get) (set (- 1))) V");
  REQUIRE(cbn.size() == 1);
  REQUIRE(cbv.size() == 1);
  CHECK(cbn[0] == "V = 0");
  CHECK(cbv[0] == "V = (- 1)");
  // get/set round trip: set returns the written value
  auto plain = solutions(st, p, "eval_cbv (set 1) V");
  REQUIRE(plain.size() == 1);
  CHECK(plain[0] == "V = 1");
}
