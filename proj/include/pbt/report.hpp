#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace pbt {

// Everything one CLI invocation needs; the CLI fills this from flags and
// tests construct it directly.
struct RunConfig {
  std::string command;        // solve | check | prop | sample
  std::string program_path;
  std::string goal;           // solve, check, goal-mode sample
  std::string cert;           // check / prop certificate text
  std::string prop;           // property name (exact, or without "prop_")
  std::string mode_override;  // "", "horn", "hh", "linear"
  uint64_t seed = 0;
  long long samples = 100;
  int lo = -1, hi = -1;  // deepen range; active when both are >= 0
  int size_factor = 0;
  long long fuel = 1'000'000;
  bool all = false;    // enumerate all solutions / counterexamples
  long long max = 1;   // cap when not `all`
  bool shrink = false;
  bool json_output = false;
  std::string replay_path;  // re-check counterexamples from this report
};

struct RunResult {
  // 0 = clean run, 1 = counterexamples found (or replay mismatch),
  // 2 = usage or parse error, 3 = runtime error.
  int exit_code = 0;
  nlohmann::ordered_json report;
  std::string text;
};

RunResult run_command(const RunConfig& cfg);

// The report minus its volatile "timings" member, for byte comparisons.
nlohmann::ordered_json strip_timings(nlohmann::ordered_json j);

}  // namespace pbt
