#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "pbt/report.hpp"

using namespace pbt;
using nlohmann::ordered_json;

namespace {

RunConfig base(const char* command, const char* file) {
  RunConfig cfg;
  cfg.command = command;
  cfg.program_path = std::string(PBT_CORPUS_DIR) + "/" + file;
  return cfg;
}

struct Exec {
  int exit_code;
  std::string out;
};

Exec run_cli(const std::string& args, const std::string& env = "") {
  std::string cmd =
      (env.empty() ? "" : env + " ") + std::string(PBT_BIN_PATH) + " " + args +
      " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    out.append(buf.data(), n);
  int status = pclose(pipe);
  int code = (status >= 256) ? status / 256 : status;  // WEXITSTATUS
  return {code, out};
}

}  // namespace

TEST_CASE("solve reports solutions and exit code 0") {
  RunConfig cfg = base("solve", "lists.sl");
  cfg.goal = "append (z :: nil) K (z :: z :: nil)";
  cfg.all = true;
  RunResult r = run_command(cfg);
  CHECK(r.exit_code == 0);
  auto& res = r.report["results"][0];
  CHECK(res["count"] == 1);
  CHECK(res["solutions"][0]["bindings"]["K"] == "z :: nil");
  CHECK(r.report["tool"]["name"] == "pbt");
  CHECK(r.report.contains("timings"));
}

TEST_CASE("prop counterexamples set exit code 1") {
  RunConfig cfg = base("prop", "lists.sl");
  cfg.prop = "prop_rev_id";
  cfg.cert = "height 3";
  cfg.all = true;
  RunResult r = run_command(cfg);
  CHECK(r.exit_code == 1);
  auto& res = r.report["results"][0];
  CHECK(res["property"] == "prop_rev_id");
  CHECK(res["tested"] == 5);
  REQUIRE(res["counterexamples"].size() == 1);
  CHECK(res["counterexamples"][0]["bindings"]["Xs"] == "(s z) :: z :: nil");
}

TEST_CASE("the prop_ prefix is optional in property lookup") {
  RunConfig cfg = base("prop", "lists.sl");
  cfg.prop = "rev_id";
  cfg.cert = "height 3";
  RunResult r = run_command(cfg);
  CHECK(r.exit_code == 1);
  CHECK(r.report["results"][0]["property"] == "prop_rev_id");
}

TEST_CASE("usage and parse problems exit 2, runtime failures exit 3") {
  // missing certificate
  RunConfig cfg = base("prop", "lists.sl");
  cfg.prop = "prop_rev_id";
  CHECK(run_command(cfg).exit_code == 2);

  // malformed goal text
  RunConfig bad = base("solve", "lists.sl");
  bad.goal = "append (z ::";
  RunResult r2 = run_command(bad);
  CHECK(r2.exit_code == 2);
  CHECK(r2.report.contains("error"));

  // unknown property
  RunConfig missing = base("prop", "lists.sl");
  missing.prop = "no_such_prop";
  missing.cert = "height 3";
  CHECK(run_command(missing).exit_code == 2);

  // fuel exhaustion is a runtime failure
  RunConfig tiny = base("solve", "lists.sl");
  tiny.goal = "nlist Xs";
  tiny.all = true;
  tiny.fuel = 50;
  RunResult r3 = run_command(tiny);
  CHECK(r3.exit_code == 3);
  CHECK(r3.report.contains("error"));
}

TEST_CASE("deepen range is echoed and bounds are validated") {
  RunConfig cfg = base("prop", "lists.sl");
  cfg.prop = "prop_rev_sym";
  cfg.lo = 1;
  cfg.hi = 5;
  RunResult r = run_command(cfg);
  CHECK(r.exit_code == 0);
  CHECK(r.report["config"]["lo"] == 1);
  CHECK(r.report["config"]["hi"] == 5);
  CHECK(r.report["results"][0]["counterexamples"].empty());

  cfg.lo = 5;
  cfg.hi = 1;
  CHECK(run_command(cfg).exit_code == 2);
}

TEST_CASE("sample echoes the seed and tags counterexamples with seeds") {
  RunConfig cfg = base("sample", "lists.sl");
  cfg.prop = "prop_rev_id";
  cfg.samples = 25;
  cfg.seed = 11;
  RunResult r = run_command(cfg);
  CHECK(r.exit_code == 1);
  CHECK(r.report["config"]["seed"] == 11);
  auto& res = r.report["results"][0];
  CHECK(res["samples"] == 25);
  REQUIRE(!res["counterexamples"].empty());
  for (auto& c : res["counterexamples"]) CHECK(c.contains("seed"));
}

TEST_CASE("strip_timings removes only the timing block") {
  RunConfig cfg = base("solve", "lists.sl");
  cfg.goal = "isnat z";
  RunResult r = run_command(cfg);
  ordered_json j = strip_timings(r.report);
  CHECK_FALSE(j.contains("timings"));
  CHECK(j.contains("results"));
}

TEST_CASE("identical configurations give identical stripped reports") {
  RunConfig cfg = base("sample", "lists.sl");
  cfg.prop = "prop_rev_id";
  cfg.samples = 40;
  cfg.seed = 99;
  RunResult a = run_command(cfg);
  RunResult b = run_command(cfg);
  ordered_json ja = strip_timings(a.report);
  ordered_json jb = strip_timings(b.report);
  CHECK(ja.dump() == jb.dump());
}

TEST_CASE("replay confirms a fresh report and flags tampering") {
  RunConfig cfg = base("prop", "lists.sl");
  cfg.prop = "prop_rev_id";
  cfg.cert = "height 3";
  cfg.all = true;
  RunResult r = run_command(cfg);
  REQUIRE(r.exit_code == 1);

  std::string path = "replay_report_test.json";
  {
    std::ofstream f(path);
    f << r.report.dump(2);
  }
  RunConfig rep = base("prop", "lists.sl");
  rep.replay_path = path;
  RunResult ok = run_command(rep);
  CHECK(ok.exit_code == 0);
  CHECK(ok.report["results"][0]["confirmed"] == 1);
  CHECK(ok.report["results"][0]["failed"] == 0);

  // tamper with the stored binding: replay must fail with exit 1
  ordered_json broken = r.report;
  broken["results"][0]["counterexamples"][0]["bindings"]["Ys"] =
      "(s z) :: z :: nil";
  {
    std::ofstream f(path);
    f << broken.dump(2);
  }
  RunResult bad = run_command(rep);
  CHECK(bad.exit_code == 1);
  CHECK(bad.report["results"][0]["failed"] == 1);
  std::remove(path.c_str());
}

TEST_CASE("the command line binary wires flags through") {
  std::string corpus = std::string(PBT_CORPUS_DIR);
  Exec solve = run_cli("solve --program " + corpus +
                       "/lists.sl --goal \"isnat N\" -n 2");
  CHECK(solve.exit_code == 0);
  CHECK(solve.out.find("N = z") != std::string::npos);
  CHECK(solve.out.find("N = s z") != std::string::npos);

  Exec prop = run_cli("prop --program " + corpus +
                      "/lists.sl --prop rev_id --cert \"height 3\" --json");
  CHECK(prop.exit_code == 1);
  auto j = ordered_json::parse(prop.out);
  CHECK(j["results"][0]["counterexamples"].size() == 1);

  Exec usage = run_cli("prop --program " + corpus + "/lists.sl");
  CHECK(usage.exit_code == 2);

  Exec missing = run_cli("solve --goal \"isnat N\"");
  CHECK(missing.exit_code == 2);  // --program is required

  Exec sample = run_cli("sample --program " + corpus +
                        "/lists.sl --goal \"nlist Xs\" -n 3 --seed 5");
  CHECK(sample.exit_code == 0);
  CHECK(sample.out.find("sampled") != std::string::npos);
}

TEST_CASE("the environment can set the default fuel") {
  std::string corpus = std::string(PBT_CORPUS_DIR);
  Exec starved = run_cli("solve --program " + corpus +
                         "/lists.sl --goal \"nlist Xs\" --all --fuel 50");
  CHECK(starved.exit_code == 3);

  // PBT_FUEL supplies the default (1M would have succeeded on this goal)
  Exec env_starved = run_cli("solve --program " + corpus +
                                 "/lists.sl --goal \"rev (z :: nil) K\"",
                             "PBT_FUEL=2");
  CHECK(env_starved.exit_code == 3);
  Exec env_fine = run_cli(
      "solve --program " + corpus + "/lists.sl --goal \"isnat z\"",
      "PBT_FUEL=50");
  CHECK(env_fine.exit_code == 0);
}
