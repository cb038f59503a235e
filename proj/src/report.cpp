#include "pbt/report.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "pbt/engine.hpp"
#include "pbt/errors.hpp"
#include "pbt/fpclib.hpp"
#include "pbt/harness.hpp"
#include "pbt/kernel.hpp"
#include "pbt/parser.hpp"
#include "pbt/printer.hpp"
#include "pbt/terms.hpp"

namespace pbt {

namespace {

using ordered_json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Mode parse_mode(const std::string& s) {
  if (s == "horn") return Mode::Horn;
  if (s == "hh") return Mode::HH;
  if (s == "linear") return Mode::Linear;
  throw UsageError("unknown mode: " + s);
}

ordered_json config_echo(const RunConfig& cfg) {
  ordered_json j;
  j["command"] = cfg.command;
  j["program"] = cfg.program_path;
  if (!cfg.goal.empty()) j["goal"] = cfg.goal;
  if (!cfg.cert.empty()) j["certificate"] = cfg.cert;
  if (!cfg.prop.empty()) j["property"] = cfg.prop;
  if (!cfg.mode_override.empty()) j["mode"] = cfg.mode_override;
  if (cfg.command == "sample") {
    j["seed"] = cfg.seed;
    j["samples"] = cfg.samples;
  }
  if (cfg.lo >= 0 && cfg.hi >= 0) {
    j["lo"] = cfg.lo;
    j["hi"] = cfg.hi;
    if (cfg.size_factor > 0) j["size_factor"] = cfg.size_factor;
  }
  j["fuel"] = cfg.fuel;
  j["all"] = cfg.all;
  if (!cfg.all) j["max"] = cfg.max;
  if (cfg.shrink) j["shrink"] = true;
  if (!cfg.replay_path.empty()) j["replay"] = cfg.replay_path;
  return j;
}

ordered_json cex_json(const Store& st, const Program& prog,
                      const Counterexample& cex) {
  ordered_json j;
  ordered_json bs;
  for (const auto& b : cex.bindings) bs[b.var] = b.printed;
  j["bindings"] = bs;
  if (cex.cert_tree) j["certificate"] = print_term(st, cex.cert_tree, &prog);
  if (cex.bound >= 0) j["bound"] = cex.bound;
  if (cex.has_seed) j["seed"] = cex.seed;
  return j;
}

void cex_text(std::ostringstream& out, const Counterexample& cex) {
  for (const auto& b : cex.bindings)
    out << "  " << b.var << " = " << b.printed << "\n";
}

const PropertySpec* lookup_prop(const Program& prog, const std::string& name) {
  if (const auto* p = prog.find_prop(name)) return p;
  return prog.find_prop("prop_" + name);
}

struct Runner {
  const RunConfig& cfg;
  Store st;
  Program prog;
  ordered_json results = ordered_json::array();
  std::ostringstream text;
  bool found_cex = false;

  explicit Runner(const RunConfig& cfg_) : cfg(cfg_) {
    SurfaceProgram sp = parse_program_file(cfg.program_path);
    if (!cfg.mode_override.empty()) sp.mode = parse_mode(cfg.mode_override);
    prog = compile(sp);
  }

  long long solution_cap() const { return cfg.all ? 0 : cfg.max; }

  void run_solve(bool checked) {
    if (cfg.goal.empty()) throw UsageError(cfg.command + " needs --goal");
    ParsedGoal pg = parse_goal(cfg.goal, prog);
    Term cert_tpl = nullptr;
    if (checked) {
      if (cfg.cert.empty()) throw UsageError("check needs --cert");
      cert_tpl = parse_cert(cfg.cert, prog);
    }
    auto m = st.mark();
    std::vector<Term> metas;
    for (const auto& v : pg.vars) metas.push_back(st.fresh_meta(v));
    Goal goal = goal_open(pg.goal, metas);
    FuelBudget budget{cfg.fuel};
    EngineOpts opts{&budget};
    ordered_json sols = ordered_json::array();
    long long cap = solution_cap();
    long long count = 0;
    Term cert = nullptr;
    auto on_solution = [&]() -> bool {
      ++count;
      Printer pr(st, &prog);
      ordered_json s;
      ordered_json bs;
      for (size_t i = 0; i < pg.vars.size(); ++i)
        bs[pg.vars[i]] = pr.term(st.resolve(metas[i]));
      s["bindings"] = bs;
      if (cert && cert_records(st, cert)) {
        Term tree = maxtree_of(st, cert);
        if (tree)
          s["certificate"] = print_term(st, st.resolve(tree), &prog);
      }
      sols.push_back(std::move(s));
      return cap > 0 && count >= cap;
    };
    if (checked) {
      cert = instantiate_cert(st, cert_tpl);
      Fpc fpc = standard_fpc(&prog);
      prove_checked(st, prog, goal, cert, fpc, opts, on_solution);
    } else {
      prove(st, prog, goal, opts, on_solution);
    }
    st.undo_to(m);
    ordered_json r;
    r["goal"] = cfg.goal;
    if (checked) r["certificate"] = cfg.cert;
    r["solutions"] = sols;
    r["count"] = count;
    results.push_back(std::move(r));
    text << (checked ? "check " : "solve ") << cfg.goal << "\n";
    if (count == 0) {
      text << "  no solutions\n";
    } else {
      int i = 0;
      for (const auto& s : sols) {
        text << "solution " << ++i << ":\n";
        if (s["bindings"].empty()) text << "  (no variables)\n";
        for (auto it = s["bindings"].begin(); it != s["bindings"].end(); ++it)
          text << "  " << it.key() << " = " << it.value().get<std::string>()
               << "\n";
      }
    }
  }

  void run_prop() {
    if (cfg.prop.empty()) throw UsageError("prop needs --prop");
    const PropertySpec* prop = lookup_prop(prog, cfg.prop);
    if (!prop) throw UsageError("unknown property: " + cfg.prop);
    RunLimits limits;
    limits.fuel = cfg.fuel;
    limits.max_cex = cfg.all ? 0 : (int)cfg.max;

    ordered_json r;
    r["property"] = prop->name;
    std::vector<Counterexample> cexes;
    if (cfg.lo >= 0 && cfg.hi >= 0) {
      if (cfg.lo > cfg.hi) throw UsageError("--lo must not exceed --hi");
      DeepenRun run =
          deepen(st, prog, *prop, cfg.lo, cfg.hi, cfg.size_factor, limits);
      ordered_json d;
      d["lo"] = cfg.lo;
      d["hi"] = cfg.hi;
      if (cfg.size_factor > 0) d["size_factor"] = cfg.size_factor;
      r["deepen"] = d;
      r["tested"] = run.tested;
      r["naf_skipped"] = run.naf_skipped;
      if (run.first_cex_bound >= 0)
        r["first_counterexample_bound"] = run.first_cex_bound;
      cexes = std::move(run.cexes);
    } else {
      if (cfg.cert.empty())
        throw UsageError("prop needs --cert or a --lo/--hi range");
      Term cert_tpl = parse_cert(cfg.cert, prog);
      Term cert = instantiate_cert(st, cert_tpl);
      Fpc fpc = standard_fpc(&prog);
      r["certificate"] = cfg.cert;
      PropRun run = run_property(st, prog, *prop, cert, fpc, limits);
      r["tested"] = run.tested;
      r["naf_skipped"] = run.naf_skipped;
      cexes = std::move(run.cexes);
    }
    ordered_json cj = ordered_json::array();
    for (const auto& cex : cexes) cj.push_back(cex_json(st, prog, cex));
    r["counterexamples"] = cj;
    text << "property " << prop->name << ": ";
    if (cexes.empty()) {
      text << "no counterexamples (" << r["tested"] << " candidates)\n";
    } else {
      found_cex = true;
      text << cexes.size() << " counterexample"
           << (cexes.size() == 1 ? "" : "s") << "\n";
      int i = 0;
      for (const auto& cex : cexes) {
        text << "counterexample " << ++i;
        if (cex.bound >= 0) text << " (height " << cex.bound << ")";
        text << ":\n";
        cex_text(text, cex);
      }
      if (cfg.shrink) {
        const Counterexample& first = cexes.front();
        Counterexample small = shrink(st, prog, *prop, first, limits);
        r["shrunk"] = cex_json(st, prog, small);
        text << "shrunk:\n";
        cex_text(text, small);
      }
    }
    results.push_back(std::move(r));
  }

  void run_sample() {
    RunLimits limits;
    limits.fuel = cfg.fuel;
    limits.max_cex = 0;
    if (!cfg.prop.empty()) {
      const PropertySpec* prop = lookup_prop(prog, cfg.prop);
      if (!prop) throw UsageError("unknown property: " + cfg.prop);
      SampleRun run = sample(st, prog, *prop, cfg.samples, cfg.seed, limits);
      ordered_json r;
      r["property"] = prop->name;
      r["seed"] = cfg.seed;
      r["samples"] = run.attempts;
      r["discards"] = run.discards;
      r["values"] = run.values;
      ordered_json cj = ordered_json::array();
      for (const auto& cex : run.cexes) cj.push_back(cex_json(st, prog, cex));
      r["counterexamples"] = cj;
      results.push_back(std::move(r));
      text << "sampled " << prop->name << " " << run.attempts << " times ("
           << run.discards << " discards): " << run.cexes.size()
           << " counterexample" << (run.cexes.size() == 1 ? "" : "s") << "\n";
      int i = 0;
      for (const auto& cex : run.cexes) {
        text << "counterexample " << ++i << " (seed " << cex.seed << "):\n";
        cex_text(text, cex);
      }
      if (!run.cexes.empty()) found_cex = true;
      return;
    }
    if (cfg.goal.empty()) throw UsageError("sample needs --prop or --goal");
    // Goal mode: report the generated values only.
    ParsedGoal pg = parse_goal(cfg.goal, prog);
    ordered_json values = ordered_json::array();
    long long discards = 0;
    for (long long i = 0; i < cfg.samples; ++i) {
      uint64_t attempt_seed = RandomSource::derive(cfg.seed, (uint64_t)i);
      auto rnd = RandomSource::seeded(attempt_seed);
      Fpc fpc = standard_fpc(&prog, rnd);
      auto m = st.mark();
      std::vector<Term> metas;
      for (const auto& v : pg.vars) metas.push_back(st.fresh_meta(v));
      Goal goal = goal_open(pg.goal, metas);
      FuelBudget budget{cfg.fuel};
      EngineOpts opts{&budget};
      bool ok = false;
      try {
        ok = prove_checked(st, prog, goal, noweight_cert(), fpc, opts,
                           [] { return true; });
      } catch (const FuelExhausted&) {
        ok = false;
      }
      if (!ok) {
        ++discards;
        st.undo_to(m);
        continue;
      }
      Printer pr(st, &prog);
      std::string v;
      for (size_t j = 0; j < pg.vars.size(); ++j) {
        if (j) v += ", ";
        v += pg.vars[j] + " = " + pr.term(st.resolve(metas[j]));
      }
      values.push_back(v);
      st.undo_to(m);
    }
    ordered_json r;
    r["goal"] = cfg.goal;
    r["seed"] = cfg.seed;
    r["samples"] = cfg.samples;
    r["discards"] = discards;
    r["values"] = values;
    results.push_back(std::move(r));
    text << "sampled " << cfg.goal << " " << cfg.samples << " times ("
         << discards << " discards)\n";
    for (const auto& v : values) text << "  " << v.get<std::string>() << "\n";
  }

  // Re-check every counterexample stored in a previous JSON report.
  void run_replay() {
    std::ifstream in(cfg.replay_path);
    if (!in) throw UsageError("cannot open replay file: " + cfg.replay_path);
    ordered_json old;
    try {
      in >> old;
    } catch (const std::exception& e) {
      throw UsageError(std::string("bad replay file: ") + e.what());
    }
    long long confirmed = 0, failed = 0;
    ordered_json rows = ordered_json::array();
    for (const auto& entry : old.value("results", ordered_json::array())) {
      if (!entry.contains("property") || !entry.contains("counterexamples"))
        continue;
      std::string pname = entry["property"].get<std::string>();
      const PropertySpec* prop = lookup_prop(prog, pname);
      if (!prop) throw UsageError("unknown property in replay: " + pname);
      for (const auto& cex : entry["counterexamples"]) {
        std::vector<Term> values;
        ordered_json shown;
        for (const auto& var : prop->vars) {
          if (cex["bindings"].contains(var)) {
            std::string s = cex["bindings"][var].get<std::string>();
            shown[var] = s;
            try {
              values.push_back(parse_term(s, prog));
            } catch (const ParseError&) {
              // Open values (reported as _0, _1, ...) stay unconstrained.
              values.push_back(st.fresh_meta(var));
            }
          } else {
            values.push_back(st.fresh_meta(var));
          }
        }
        bool ok = replay_ok(st, prog, *prop, values, cfg.fuel);
        ordered_json row;
        row["property"] = pname;
        row["bindings"] = shown;
        row["confirmed"] = ok;
        rows.push_back(std::move(row));
        (ok ? confirmed : failed)++;
      }
    }
    ordered_json r;
    r["replayed"] = confirmed + failed;
    r["confirmed"] = confirmed;
    r["failed"] = failed;
    r["counterexamples"] = rows;
    results.push_back(std::move(r));
    text << "replayed " << (confirmed + failed) << " counterexample"
         << (confirmed + failed == 1 ? "" : "s") << ": " << confirmed
         << " confirmed, " << failed << " failed\n";
    if (failed > 0) found_cex = true;  // drives exit code 1
  }
};

}  // namespace

ordered_json strip_timings(ordered_json j) {
  j.erase("timings");
  return j;
}

RunResult run_command(const RunConfig& cfg) {
  auto started = std::chrono::steady_clock::now();
  RunResult out;
  out.report["tool"] = {{"name", "pbt"}, {"version", "0.1.0"}};
  out.report["config"] = config_echo(cfg);
  int exit_code = 0;
  try {
    Runner runner(cfg);
    if (!cfg.replay_path.empty()) {
      runner.run_replay();
      exit_code = runner.found_cex ? 1 : 0;
    } else if (cfg.command == "solve") {
      runner.run_solve(false);
    } else if (cfg.command == "check") {
      runner.run_solve(true);
    } else if (cfg.command == "prop") {
      runner.run_prop();
      exit_code = runner.found_cex ? 1 : 0;
    } else if (cfg.command == "sample") {
      runner.run_sample();
      exit_code = runner.found_cex ? 1 : 0;
    } else {
      throw UsageError("unknown command: " + cfg.command);
    }
    out.report["results"] = std::move(runner.results);
    out.text = runner.text.str();
  } catch (const UsageError& e) {
    out.report["error"] = e.what();
    out.text = std::string("error: ") + e.what() + "\n";
    exit_code = 2;
  } catch (const ParseError& e) {
    out.report["error"] = e.what();
    out.text = std::string("error: ") + e.what() + "\n";
    exit_code = 2;
  } catch (const std::exception& e) {
    out.report["error"] = e.what();
    out.text = std::string("error: ") + e.what() + "\n";
    exit_code = 3;
  }
  auto elapsed = std::chrono::steady_clock::now() - started;
  out.report["timings"] = {
      {"total_ms",
       std::chrono::duration_cast<std::chrono::milliseconds>(elapsed)
           .count()}};
  out.exit_code = exit_code;
  return out;
}

}  // namespace pbt
