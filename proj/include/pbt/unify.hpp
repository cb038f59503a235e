#pragma once

#include "pbt/terms.hpp"

namespace pbt {

// Higher-order pattern unification with scope levels.
//
// On success returns true with the new bindings left on the store trail
// (the caller removes them with Store::undo_to when backtracking). On
// failure returns false and the store is restored to its state at entry.
// Throws NonPatternProblem when a flexible subterm is applied to anything
// other than distinct eigenvariables newer than the metavariable.
bool unify(Store& st, const Term& a, const Term& b);

}  // namespace pbt
