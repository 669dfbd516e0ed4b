#include "polypack/fourier_motzkin.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "polypack/error.hpp"

namespace polypack::fm {

namespace {

// Guard against combinatorial blow-up on adversarial inputs.
constexpr std::size_t kMaxConstraints = 4000;

// Coefficient map with the first entry forced positive; `flipped` records
// whether the original had to be negated to get there.
std::map<std::string, Rational> direction(const AffineExpr& e, bool& flipped) {
  std::map<std::string, Rational> out = e.coeffs();
  flipped = !out.empty() && out.begin()->second.sign() < 0;
  if (flipped) {
    for (auto& [name, c] : out) c = -c;
  }
  return out;
}

}  // namespace

void simplify(System& sys) {
  if (sys.infeasible) return;
  std::vector<Constraint> mods;
  // direction -> tightest constant for e >= 0 written as dir.x + k >= 0 (and
  // for the flipped direction, -dir.x + k >= 0).
  struct Bounds {
    std::optional<Rational> lower_const;  // dir.x + k >= 0  => keep min k
    std::optional<Rational> upper_const;  // -dir.x + k >= 0 => keep min k
    std::optional<Rational> eq_const;     // dir.x + k = 0
  };
  std::map<std::map<std::string, Rational>, Bounds> by_dir;
  std::vector<std::map<std::string, Rational>> order;

  for (Constraint c : sys.constraints) {
    Truth t = normalize(c);
    if (t == Truth::True) continue;
    if (t == Truth::False) {
      sys.infeasible = true;
      sys.constraints.clear();
      return;
    }
    if (c.kind == ConstraintKind::ModEq) {
      if (std::find(mods.begin(), mods.end(), c) == mods.end()) mods.push_back(c);
      continue;
    }
    bool flipped = false;
    auto dir = direction(c.expr, flipped);
    auto [it, inserted] = by_dir.try_emplace(dir);
    if (inserted) order.push_back(dir);
    Bounds& b = it->second;
    Rational k = flipped ? -c.expr.constant() : c.expr.constant();
    if (c.kind == ConstraintKind::Eq) {
      // Equalities are normalized with a positive leading coefficient.
      if (b.eq_const && *b.eq_const != k) {
        sys.infeasible = true;
        sys.constraints.clear();
        return;
      }
      b.eq_const = k;
    } else if (!flipped) {
      if (!b.lower_const || k < *b.lower_const) b.lower_const = k;
    } else {
      Rational kk = c.expr.constant();
      if (!b.upper_const || kk < *b.upper_const) b.upper_const = kk;
    }
  }

  std::vector<Constraint> out;
  for (const auto& dir : order) {
    Bounds& b = by_dir[dir];
    AffineExpr base;
    for (const auto& [name, c] : dir) base.set_coeff(name, c);
    // Feasible range for v = dir.x: -lower_const <= v <= upper_const.
    std::optional<Rational> lo, hi;
    if (b.lower_const) lo = -*b.lower_const;
    if (b.upper_const) hi = *b.upper_const;
    if (b.eq_const) {
      Rational v = -*b.eq_const;
      if ((lo && v < *lo) || (hi && v > *hi)) {
        sys.infeasible = true;
        sys.constraints.clear();
        return;
      }
      AffineExpr e = base;
      e.set_constant(*b.eq_const);
      out.push_back(Constraint::eq(e));
      continue;
    }
    if (lo && hi) {
      if (*hi < *lo) {
        sys.infeasible = true;
        sys.constraints.clear();
        return;
      }
      if (*hi == *lo) {
        AffineExpr e = base;
        e.set_constant(-*lo);
        out.push_back(Constraint::eq(e));
        continue;
      }
    }
    if (lo) {
      AffineExpr e = base;
      e.set_constant(-*lo);
      out.push_back(Constraint::ge(e));
    }
    if (hi) {
      AffineExpr e = -base;
      e.set_constant(*hi);
      out.push_back(Constraint::ge(e));
    }
  }
  for (auto& m : mods) out.push_back(std::move(m));
  sys.constraints = std::move(out);
}

void eliminate(System& sys, const std::string& var, ModPolicy policy) {
  if (sys.infeasible) return;

  // Equality substitution first; pick the smallest coefficient.
  const Constraint* pivot = nullptr;
  for (const auto& c : sys.constraints) {
    if (c.kind != ConstraintKind::Eq || !c.expr.mentions(var)) continue;
    if (!pivot || c.expr.coeff(var).abs() < pivot->expr.coeff(var).abs()) pivot = &c;
  }
  if (pivot) {
    Rational a = pivot->expr.coeff(var);
    AffineExpr rest = pivot->expr;
    rest.set_coeff(var, 0);
    AffineExpr value = rest * (Rational(-1) / a);
    if (a.abs() != Rational(1)) sys.exact = false;
    Constraint chosen = *pivot;
    std::vector<Constraint> out;
    for (const auto& c : sys.constraints) {
      if (c == chosen) continue;
      Constraint s = c.substitute(var, value);
      if (s.kind == ConstraintKind::ModEq && c.mentions(var) && !s.expr.has_integer_coeffs()) {
        if (policy == ModPolicy::Throw) {
          throw Error(ErrorKind::ProjectionBlocked,
                      "projection blocked by mod constraint " + c.str() + " on '" + var + "'");
        }
        sys.exact = false;
        continue;
      }
      out.push_back(std::move(s));
    }
    sys.constraints = std::move(out);
    simplify(sys);
    return;
  }

  std::vector<Constraint> pos, neg, out;
  for (const auto& c : sys.constraints) {
    if (!c.mentions(var)) {
      out.push_back(c);
      continue;
    }
    if (c.kind == ConstraintKind::ModEq) {
      if (policy == ModPolicy::Throw) {
        throw Error(ErrorKind::ProjectionBlocked,
                    "projection blocked by mod constraint " + c.str() + " on '" + var + "'");
      }
      sys.exact = false;
      continue;
    }
    (c.expr.coeff(var).sign() > 0 ? pos : neg).push_back(c);
  }
  for (const auto& p : pos) {
    for (const auto& n : neg) {
      Rational ap = p.expr.coeff(var);
      Rational an = -n.expr.coeff(var);
      if (ap != Rational(1) && an != Rational(1)) sys.exact = false;
      out.push_back(Constraint::ge(p.expr * an + n.expr * ap));
    }
  }
  sys.constraints = std::move(out);
  simplify(sys);
}

void project_onto(System& sys, const std::vector<std::string>& keep, ModPolicy policy) {
  std::set<std::string> keep_set(keep.begin(), keep.end());
  while (!sys.infeasible) {
    std::set<std::string> candidates;
    for (const auto& c : sys.constraints) {
      for (const auto& v : c.vars()) {
        if (!keep_set.count(v)) candidates.insert(v);
      }
    }
    if (candidates.empty()) break;
    std::string best;
    long best_score = std::numeric_limits<long>::max();
    for (const auto& v : candidates) {
      long np = 0, nn = 0;
      bool in_eq = false;
      for (const auto& c : sys.constraints) {
        if (!c.expr.mentions(v)) continue;
        if (c.kind == ConstraintKind::Eq) in_eq = true;
        if (c.kind != ConstraintKind::Ge) continue;
        (c.expr.coeff(v).sign() > 0 ? np : nn) += 1;
      }
      long score = in_eq ? -1 : np * nn - np - nn;
      if (score < best_score) {
        best_score = score;
        best = v;
      }
    }
    eliminate(sys, best, policy);
    if (sys.constraints.size() > kMaxConstraints) {
      throw Error(ErrorKind::Overflow, "Fourier-Motzkin elimination exceeded constraint budget");
    }
  }
}

bool rationally_empty(const std::vector<Constraint>& constraints,
                      const std::vector<std::string>& positive) {
  System sys;
  sys.constraints = constraints;
  for (const auto& p : positive) {
    sys.constraints.push_back(Constraint::ge(AffineExpr::var(p) - AffineExpr(Rational(1))));
  }
  simplify(sys);
  try {
    project_onto(sys, {}, ModPolicy::Drop);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Overflow) return false;
    throw;
  }
  return sys.infeasible;
}

bool implies(const std::vector<Constraint>& constraints,
             const std::vector<std::string>& positive, const Constraint& c) {
  Constraint n = c;
  Truth t = normalize(n);
  if (t == Truth::True) return true;
  if (std::find(constraints.begin(), constraints.end(), c) != constraints.end()) return true;
  auto with = [&](Constraint extra) {
    std::vector<Constraint> cs = constraints;
    cs.push_back(std::move(extra));
    return rationally_empty(cs, positive);
  };
  if (t == Truth::False) return with(Constraint::ge(AffineExpr(Rational(0))));
  switch (n.kind) {
    case ConstraintKind::Ge: return with(negate_ge(n));
    case ConstraintKind::Eq:
      return with(Constraint::ge(n.expr - AffineExpr(Rational(1)))) &&
             with(Constraint::ge(-n.expr - AffineExpr(Rational(1))));
    case ConstraintKind::ModEq: return false;
  }
  return false;
}

}  // namespace polypack::fm
