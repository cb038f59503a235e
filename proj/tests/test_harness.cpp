#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "pbt/errors.hpp"
#include "pbt/fpclib.hpp"
#include "pbt/harness.hpp"
#include "pbt/parser.hpp"
#include "pbt/syntax.hpp"
#include "pbt/terms.hpp"

using namespace pbt;

namespace {

Program load(const char* file) {
  return compile(parse_program_file(std::string(PBT_CORPUS_DIR) + "/" + file));
}

const PropertySpec& prop_of(const Program& p, const char* name) {
  const PropertySpec* pr = p.find_prop(name);
  REQUIRE(pr != nullptr);
  return *pr;
}

}  // namespace

TEST_CASE("run_property reports falsifying bindings and honors max_cex") {
  Store st;
  Program p = load("lists.sl");
  const auto& prop = prop_of(p, "prop_rev_id");
  RunLimits lim;
  lim.max_cex = 0;  // collect everything
  Fpc fpc = standard_fpc(&p);
  PropRun run = run_property(st, p, prop, height_cert(3), fpc, lim);
  REQUIRE(run.cexes.size() == 1);
  CHECK(run.cexes[0].key == "Xs = (s z) :: z :: nil, Ys = z :: (s z) :: nil");
  CHECK(run.tested == 5);  // the height-3 generator solutions
  CHECK_FALSE(run.stopped_early);
  CHECK(run.cexes[0].find("Xs") != nullptr);
  CHECK(run.cexes[0].find("Zz") == nullptr);

  // a true property has no counterexamples
  PropRun ok = run_property(st, p, prop_of(p, "prop_rev_sym"),
                            height_cert(3), fpc, lim);
  CHECK(ok.cexes.empty());

  // with max_cex = 1 a richer bound stops at the first find
  RunLimits one;
  one.max_cex = 1;
  PropRun stopped =
      run_property(st, p, prop, height_cert(4), fpc, one);
  CHECK(stopped.cexes.size() == 1);
  CHECK(stopped.stopped_early);
}

TEST_CASE("run_property leaves the store clean") {
  Store st;
  Program p = load("lists.sl");
  auto mark = st.mark();
  RunLimits lim;
  Fpc fpc = standard_fpc(&p);
  run_property(st, p, prop_of(p, "prop_rev_id"), height_cert(4), fpc, lim);
  CHECK(st.mark() == mark);
}

TEST_CASE("then-goals with unbound variables are an error, not a pass") {
  Store st;
  Program p = compile(parse_program(R"(
mode horn.
ctor z 0.
ctor s 1.
isnat z.
isnat (s N) :- isnat N.
prop dangling :=
  gen: isnat N.
  then: isnat M.
)",
                                    "inline"));
  RunLimits lim;
  Fpc fpc = standard_fpc(&p);
  try {
    run_property(st, p, prop_of(p, "dangling"), height_cert(2), fpc, lim);
    FAIL("expected NonGroundNegation");
  } catch (const NonGroundNegation& e) {
    std::string msg = e.what();
    CHECK(msg.find("dangling") != std::string::npos);
    CHECK(msg.find("M") != std::string::npos);
  }
}

TEST_CASE("deepen dedups across bounds and records the first") {
  Store st;
  Program p = load("lists.sl");
  RunLimits lim;
  lim.max_cex = 0;
  DeepenRun run = deepen(st, p, prop_of(p, "prop_rev_id"), 1, 4, 0, lim);
  CHECK(run.first_cex_bound == 3);
  int seen_golden = 0;
  bool seen_flipped = false;
  for (const auto& c : run.cexes) {
    CHECK((c.bound == 3 || c.bound == 4));
    if (c.find("Xs")->printed == "(s z) :: z :: nil") {
      ++seen_golden;
      CHECK(c.bound == 3);  // reported at its first bound only
    }
    if (c.find("Xs")->printed == "z :: (s z) :: nil") {
      seen_flipped = true;
      CHECK(c.bound == 4);  // the mirror image only fits at four
    }
  }
  CHECK(seen_golden == 1);
  CHECK(seen_flipped);

  DeepenRun quiet = deepen(st, p, prop_of(p, "prop_rev_sym"), 1, 5, 0, lim);
  CHECK(quiet.cexes.empty());
  CHECK(quiet.first_cex_bound == -1);
}

TEST_CASE("deepen with a size factor pairs height with sze") {
  Store st;
  Program p = load("lists.sl");
  RunLimits lim;
  lim.max_cex = 0;
  // the smallest counterexample list has size 6, so a budget of h*1
  // keeps every two-element list out until h reaches 6
  DeepenRun run = deepen(st, p, prop_of(p, "prop_rev_id"), 1, 5, 1, lim);
  CHECK(run.cexes.empty());
  DeepenRun run2 = deepen(st, p, prop_of(p, "prop_rev_id"), 1, 6, 1, lim);
  REQUIRE(!run2.cexes.empty());
  CHECK(run2.first_cex_bound == 6);
}

TEST_CASE("sampling is deterministic per seed and tags counterexamples") {
  Store st;
  Program p = load("lists.sl");
  RunLimits lim;
  SampleRun a = sample(st, p, prop_of(p, "prop_rev_id"), 30, 42, lim);
  SampleRun b = sample(st, p, prop_of(p, "prop_rev_id"), 30, 42, lim);
  CHECK(a.values == b.values);
  CHECK(a.attempts == 30);
  CHECK(a.tested == 30);  // list generation cannot fail
  REQUIRE(!a.cexes.empty());
  CHECK(a.cexes.size() == b.cexes.size());
  for (const auto& c : a.cexes) CHECK(c.has_seed);

  SampleRun c = sample(st, p, prop_of(p, "prop_rev_id"), 30, 43, lim);
  CHECK(a.values != c.values);
}

TEST_CASE("failed or diverging generations count as discards") {
  Store st;
  Program p = compile(parse_program(R"(
mode horn.
ctor c 0.
loop X :- loop X.
ok c.
gen2 X :- ok X.
gen2 X :- loop X.
weights gen2 [1, 1].
prop half :=
  gen: gen2 X.
  then: ok X.
)",
                                    "inline"));
  RunLimits lim;
  lim.fuel = 2000;
  SampleRun run = sample(st, p, prop_of(p, "half"), 40, 7, lim);
  CHECK(run.attempts == 40);
  CHECK(run.discards > 0);
  CHECK(run.tested > 0);
  CHECK(run.tested + run.discards == 40);
  CHECK(run.cexes.empty());  // the surviving half always satisfies ok
}

TEST_CASE("generated list lengths follow the declared weights") {
  Store st;
  // weights nlist [1,3]: P(stop) = 1/4 per step, mean length 3; the mean of
  // 10000 draws lies within 3 sigma = 3 * (sqrt(12)/sqrt(10000)) ~ 0.104
  Program q = compile(parse_program(R"(
mode horn.
ctor z 0.
ctor s 1.
ctor nil 0.
ctor :: 2.
isnat z.
isnat (s N) :- isnat N.
nlist nil.
nlist (X :: L) :- isnat X, nlist L.
weights isnat [1, 3].
weights nlist [1, 3].
prop lengths :=
  gen: nlist Xs.
  then: nlist Xs.
)",
                                    "inline"));
  RunLimits lim;
  SampleRun run = sample(st, q, prop_of(q, "lengths"), 10000, 2026, lim);
  REQUIRE(run.tested == 10000);
  double total = 0;
  for (const auto& v : run.values) {
    size_t len = 0;
    for (size_t pos = v.find("::"); pos != std::string::npos;
         pos = v.find("::", pos + 2))
      ++len;
    total += (double)len;
  }
  double mean = total / 10000.0;
  CHECK(std::abs(mean - 3.0) < 0.104);
}

TEST_CASE("shrinking lands on a minimal distinct pair") {
  Store st;
  Program p = load("lists.sl");
  const auto& prop = prop_of(p, "prop_rev_id");
  RunLimits lim;
  Fpc fpc = standard_fpc(&p);
  PropRun run = run_property(st, p, prop, height_cert(6), fpc, lim);
  REQUIRE(!run.cexes.empty());
  Counterexample small = shrink(st, p, prop, run.cexes[0], lim);
  // a two-element list with distinct members, both drawn from the original
  const Binding* xs = small.find("Xs");
  REQUIRE(xs != nullptr);
  auto [h, args] = spine(st, xs->value);
  REQUIRE(args.size() == 2);
  Term second = st.whnf(args[1]);
  auto [h2, args2] = spine(st, second);
  REQUIRE(args2.size() == 2);
  CHECK(term_eq(st, st.whnf(args2[1]), mk_const("nil")));
  CHECK_FALSE(term_eq(st, args[0], args2[0]));
  // still a counterexample
  std::vector<Term> vals;
  for (const auto& b : small.bindings) vals.push_back(b.value);
  CHECK(replay_ok(st, p, prop, vals, 100000));
}

TEST_CASE("shrinking an already minimal counterexample keeps it") {
  Store st;
  Program p = load("lists.sl");
  const auto& prop = prop_of(p, "prop_rev_id");
  RunLimits lim;
  Fpc fpc = standard_fpc(&p);
  PropRun run = run_property(st, p, prop, height_cert(3), fpc, lim);
  REQUIRE(run.cexes.size() == 1);
  Counterexample small = shrink(st, p, prop, run.cexes[0], lim);
  CHECK(small.find("Xs")->printed == run.cexes[0].find("Xs")->printed);
}

TEST_CASE("replay accepts stored bindings and rejects tampering") {
  Store st;
  Program p = load("lists.sl");
  const auto& prop = prop_of(p, "prop_rev_id");
  RunLimits lim;
  Fpc fpc = standard_fpc(&p);
  PropRun run = run_property(st, p, prop, height_cert(3), fpc, lim);
  REQUIRE(!run.cexes.empty());
  std::vector<Term> vals;
  for (const auto& b : run.cexes[0].bindings) vals.push_back(b.value);
  CHECK(replay_ok(st, p, prop, vals, 100000));

  // Ys := Xs makes the equation hold, so it is no counterexample
  std::vector<Term> tampered{vals[0], vals[0]};
  CHECK_FALSE(replay_ok(st, p, prop, tampered, 100000));
  // and a Ys that is not the reversal fails the when-goal
  Term junk = parse_term("z :: nil", p);
  std::vector<Term> broken{vals[0], junk};
  CHECK_FALSE(replay_ok(st, p, prop, broken, 100000));
}
