#pragma once

#include <string>
#include <vector>

#include "pbt/syntax.hpp"

namespace pbt {

// Program files:
//   mode horn.                         (or hh, linear; default hh)
//   ctor name ARITY.                   (also: ctor :: 2.)
//   axiom name.
//   weights pred [w1, ..., wn].        (one positive weight per clause)
//   head.                              (fact)
//   head :- goal.                      (clause)
//   prop name := gen: G. when: G. then: G.    (when part optional)
//
// Goals: tt, ff, T1 = T2, atoms, "," (and), ";" (or), "=>" (hypothetical),
// "-o" (linear hypothetical), "!" (bang), "some X\ G", "pi x\ G". Binder
// bodies extend maximally. "=>"/"-o" bind tighter than ",", which binds
// tighter than ";". Terms are applicative spines; "name\ body" is an
// abstraction; "::" is right-associative infix; "(- N)" is a negative
// literal. Capitalized names are clause/property variables; "_" is a
// fresh anonymous variable. "%" starts a comment.
SurfaceProgram parse_program(const std::string& src,
                             const std::string& filename = "");
SurfaceProgram parse_program_file(const std::string& path);

struct ParsedGoal {
  Goal goal;                      // frame-closed over `vars`
  std::vector<std::string> vars;  // first-occurrence order
};

// Standalone goal / term against an already compiled program (CLI queries,
// tests). parse_term rejects free variables.
ParsedGoal parse_goal(const std::string& src, const Program& prog);
Term parse_term(const std::string& src, const Program& prog);

// Certificate expressions:
//   any | height N | sze N | max | max _ | random | noweight
//   | collect | collect C | huniv [t1, ..., tn] (subterm|proper)
//   | C1 <c> C2                       (pairing, right-associative)
// "_" is a hole; holes are freshly instantiated for every run.
Term parse_cert(const std::string& src, const Program& prog);

// The constant standing for certificate holes in parsed templates.
extern const char* const kHoleName;

}  // namespace pbt
