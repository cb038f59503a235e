#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pbt/report.hpp"

namespace {

long long default_fuel() {
  if (const char* env = std::getenv("PBT_FUEL")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
    std::cerr << "warning: ignoring invalid PBT_FUEL=" << env << "\n";
  }
  return 1'000'000;
}

void add_common(CLI::App* cmd, pbt::RunConfig& cfg) {
  cmd->add_option("--program", cfg.program_path, "specification file")
      ->required();
  cmd->add_option("--mode", cfg.mode_override,
                  "override the file's mode (horn | hh | linear)");
  cmd->add_option("--fuel", cfg.fuel,
                  "step budget per search (default 1000000, or $PBT_FUEL)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--json", cfg.json_output, "machine-readable report");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "pbt — property-based testing for relational specifications.\n"
      "Test data comes from proof search directed by certificates: a\n"
      "certificate bounds or randomizes the search, every proof is a test\n"
      "case, and counterexamples are candidates whose conclusion finitely\n"
      "fails."};
  app.require_subcommand(1);
  pbt::RunConfig cfg;
  cfg.fuel = default_fuel();

  auto* solve = app.add_subcommand("solve", "enumerate solutions of a goal");
  add_common(solve, cfg);
  solve->add_option("--goal", cfg.goal, "goal expression")->required();
  solve->add_flag("--all", cfg.all, "enumerate every solution");
  solve->add_option("-n,--max", cfg.max, "solution cap (default 1)");

  auto* check = app.add_subcommand(
      "check", "enumerate solutions under a proof certificate");
  add_common(check, cfg);
  check->add_option("--goal", cfg.goal, "goal expression")->required();
  check->add_option("--cert", cfg.cert, "certificate expression")->required();
  check->add_flag("--all", cfg.all, "enumerate every solution");
  check->add_option("-n,--max", cfg.max, "solution cap (default 1)");

  auto* prop = app.add_subcommand("prop", "test a property");
  add_common(prop, cfg);
  prop->add_option("--prop", cfg.prop, "property name (prop_ optional)");
  prop->add_option("--cert", cfg.cert, "generator certificate");
  prop->add_option("--lo", cfg.lo, "iterative deepening: first height");
  prop->add_option("--hi", cfg.hi, "iterative deepening: last height");
  prop->add_option("--size-factor", cfg.size_factor,
                   "pair each height h with a size bound h*factor");
  prop->add_flag("--all", cfg.all, "collect every counterexample");
  prop->add_option("-n,--max", cfg.max, "counterexample cap (default 1)");
  prop->add_flag("--shrink", cfg.shrink, "minimize the first counterexample");
  prop->add_option("--replay", cfg.replay_path,
                   "re-check the counterexamples of a previous JSON report");

  auto* smp = app.add_subcommand("sample", "weighted-random generation");
  add_common(smp, cfg);
  smp->add_option("--prop", cfg.prop, "property to test on each sample");
  smp->add_option("--goal", cfg.goal, "goal to sample (generation only)");
  smp->add_option("-n,--samples", cfg.samples, "number of attempts");
  smp->add_option("--seed", cfg.seed, "master random seed")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  pbt::RunResult res = pbt::run_command(cfg);
  if (cfg.json_output)
    std::cout << res.report.dump(2) << "\n";
  else
    std::cout << res.text;
  return res.exit_code;
}
