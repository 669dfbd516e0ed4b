#pragma once

#include <string>
#include <vector>

#include "polypack/affine.hpp"

namespace polypack::fm {

/// What to do with a mod-equality that mentions a variable being eliminated.
enum class ModPolicy {
  Drop,   // relax: forget the constraint (sound over-approximation)
  Throw,  // raise ErrorKind::ProjectionBlocked
};

/// A conjunction of constraints under integer semantics. `infeasible` is set
/// once a contradiction has been derived.
struct System {
  std::vector<Constraint> constraints;
  bool infeasible = false;
  /// Cleared when an elimination step may have added rational-only points.
  bool exact = true;
};

/// Normalizes every constraint, removes duplicates and constant-true entries,
/// keeps the tightest of parallel inequalities, turns opposite inequality
/// pairs into equalities and detects contradictions.
void simplify(System& sys);

/// Eliminates `var`: substitution through an equality when one mentions it,
/// otherwise pairwise Fourier-Motzkin combination with integer tightening.
void eliminate(System& sys, const std::string& var, ModPolicy policy);

/// Eliminates every variable except `keep`, innermost choice by a
/// min-product heuristic.
void project_onto(System& sys, const std::vector<std::string>& keep, ModPolicy policy);

/// True when no rational point satisfies `constraints` together with
/// `p >= 1` for every name in `positive` (after integer tightening).
/// Mod-equalities are ignored, so a `true` answer is always sound.
bool rationally_empty(const std::vector<Constraint>& constraints,
                      const std::vector<std::string>& positive);

/// True when `constraints` (with positivity of `positive`) imply `c`.
/// A `false` answer means "not proven".
bool implies(const std::vector<Constraint>& constraints,
             const std::vector<std::string>& positive, const Constraint& c);

}  // namespace polypack::fm
