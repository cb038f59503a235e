#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "pbt/syntax.hpp"
#include "pbt/terms.hpp"

namespace pbt {

// Deterministic printing. Binder names are drawn from the pool
// x, y, z, w, u, v, x1, x2, ... skipping names the program declares, so
// printed terms re-parse to alpha-equal terms. Unbound metavariables print
// as _0, _1, ... numbered by first appearance within one Printer; negative
// integers print re-parseably as (- N).
class Printer {
 public:
  explicit Printer(const Store& st, const Program* prog = nullptr);

  std::string term(const Term& t);
  std::string goal(const Goal& g);

 private:
  std::string term_p(const Term& t, bool arg_pos);
  std::string goal_p(const Goal& g, int lvl);
  std::string fresh_binder();
  std::string meta_name(const Term& m);

  const Store& st_;
  std::set<std::string> avoid_;
  std::vector<std::string> env_;
  std::map<int, int> metas_;
};

std::string print_term(const Store& st, const Term& t,
                       const Program* prog = nullptr);
std::string print_goal(const Store& st, const Goal& g,
                       const Program* prog = nullptr);

}  // namespace pbt
