#include "polypack/polyhedron.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "polypack/error.hpp"
#include "polypack/fourier_motzkin.hpp"

namespace polypack {

namespace {

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += xs[i];
  }
  return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

bool Polyhedron::has_mod() const {
  return std::any_of(constraints.begin(), constraints.end(),
                     [](const Constraint& c) { return c.kind == ConstraintKind::ModEq; });
}

bool Polyhedron::contains(const Binding& point) const {
  if (empty) return false;
  return std::all_of(constraints.begin(), constraints.end(),
                     [&](const Constraint& c) { return c.holds(point); });
}

std::string Polyhedron::str() const {
  std::ostringstream os;
  auto ps = concat(params, outer);
  if (!ps.empty()) os << "[" << join(ps) << "] -> ";
  os << "{ [" << join(dims) << "]";
  if (empty) {
    os << " : false }";
    return os.str();
  }
  if (!constraints.empty()) {
    os << " : ";
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      if (i) os << " and ";
      os << constraints[i].str();
    }
  }
  os << " }";
  return os.str();
}

Polyhedron image(const Polyhedron& space, const AccessMap& map, bool* exact) {
  Polyhedron out;
  out.params = space.params;
  out.outer = space.outer;
  for (const auto& d : space.dims) {
    if (std::find(map.selected.begin(), map.selected.end(), d) != map.selected.end()) {
      out.dims.push_back(d);
    }
  }
  if (out.dims.size() != map.selected.size()) {
    throw Error(ErrorKind::UnknownIdentifier, "access map selects a dim outside the space");
  }
  if (space.empty) {
    out.empty = true;
    if (exact) *exact = true;
    return out;
  }
  auto project = [&](std::vector<Constraint> cs, fm::ModPolicy policy) {
    fm::System sys;
    sys.constraints = std::move(cs);
    fm::simplify(sys);
    for (auto it = space.dims.rbegin(); it != space.dims.rend(); ++it) {
      if (std::find(out.dims.begin(), out.dims.end(), *it) != out.dims.end()) continue;
      fm::eliminate(sys, *it, policy);
    }
    return sys;
  };
  try {
    fm::System sys = project(space.constraints, fm::ModPolicy::Throw);
    out.empty = sys.infeasible;
    out.constraints = std::move(sys.constraints);
    if (exact) *exact = sys.exact;
    return out;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ProjectionBlocked) throw;
    // Project the mod-free alternatives and accept the relaxed projection
    // (mod dropped, residue range kept) only when they cover it exactly.
    auto alternatives = expand_mod(space.constraints, space.params);
    if (!alternatives) throw;
    std::vector<Constraint> relaxed_cs = space.constraints;
    for (const auto& c : space.constraints) {
      if (c.kind != ConstraintKind::ModEq) continue;
      relaxed_cs.push_back(Constraint::ge(c.residue));
      relaxed_cs.push_back(Constraint::ge(c.modulus - c.residue - AffineExpr(Rational(1))));
    }
    fm::System relaxed = project(relaxed_cs, fm::ModPolicy::Drop);
    Polyhedron result = out;
    result.constraints = relaxed.constraints;
    result.empty = relaxed.infeasible;
    std::vector<Polyhedron> leftover{result};
    bool all_exact = relaxed.exact;
    for (const auto& alt : *alternatives) {
      fm::System part = project(alt, fm::ModPolicy::Throw);
      if (part.infeasible) continue;
      all_exact = all_exact && part.exact;
      Polyhedron piece = out;
      piece.constraints = part.constraints;
      std::vector<Polyhedron> next;
      for (const auto& l : leftover) {
        for (auto& r : subtract(l, piece)) next.push_back(std::move(r));
      }
      leftover = std::move(next);
    }
    if (!leftover.empty()) throw;
    if (exact) *exact = all_exact;
    return result;
  }
}

std::string primed(const std::string& name) { return name + "'"; }

std::vector<Polyhedron> preceding_slices(const Polyhedron& accessed) {
  std::map<std::string, std::string> rename;
  for (const auto& d : accessed.dims) rename[d] = primed(d);
  std::vector<Constraint> shifted;
  for (const auto& c : accessed.constraints) shifted.push_back(c.rename(rename));

  std::vector<Polyhedron> slices;
  for (std::size_t k = 0; k < accessed.dims.size(); ++k) {
    Polyhedron s;
    for (const auto& d : accessed.dims) s.dims.push_back(primed(d));
    s.params = accessed.params;
    s.outer = concat(accessed.outer, accessed.dims);
    s.empty = accessed.empty;
    s.constraints = shifted;
    s.constraints.insert(s.constraints.end(), accessed.constraints.begin(),
                         accessed.constraints.end());
    for (std::size_t t = 0; t < k; ++t) {
      s.constraints.push_back(Constraint::eq(AffineExpr::var(primed(accessed.dims[t])) -
                                             AffineExpr::var(accessed.dims[t])));
    }
    s.constraints.push_back(Constraint::ge(AffineExpr::var(accessed.dims[k]) -
                                           AffineExpr::var(primed(accessed.dims[k])) -
                                           AffineExpr(Rational(1))));
    slices.push_back(std::move(s));
  }
  return slices;
}

std::vector<DimBounds> dim_bounds(const Polyhedron& p) {
  std::vector<DimBounds> out;
  std::vector<std::string> context = concat(p.params, p.outer);
  for (const auto& d : p.dims) {
    fm::System sys;
    sys.constraints = p.constraints;
    fm::simplify(sys);
    fm::project_onto(sys, concat(context, {d}), fm::ModPolicy::Drop);
    DimBounds b;
    if (sys.infeasible) {
      // Any bound pair with lower > upper; the scan then visits nothing.
      b.lower.push_back(Constraint::ge(AffineExpr::var(d)));
      b.upper.push_back(Constraint::ge(-AffineExpr::var(d) - AffineExpr(Rational(1))));
      out.push_back(std::move(b));
      continue;
    }
    for (const auto& c : sys.constraints) {
      Rational a = c.expr.coeff(d);
      if (a.is_zero() || c.kind == ConstraintKind::ModEq) continue;
      if (c.kind == ConstraintKind::Eq) {
        Constraint lo = Constraint::ge(a.sign() > 0 ? c.expr : -c.expr);
        b.lower.push_back(lo);
        b.upper.push_back(Constraint::ge(-lo.expr));
      } else if (a.sign() > 0) {
        b.lower.push_back(c);
      } else {
        b.upper.push_back(c);
      }
    }
    if (b.lower.empty() || b.upper.empty()) {
      throw Error(ErrorKind::Unbounded, "unbounded iterator '" + d + "' in " + p.str());
    }
    out.push_back(std::move(b));
  }
  return out;
}

Enumerator::Enumerator(const Polyhedron& p) : poly_(p) {
  for (const auto& v : p.params) slots_.add(v);
  for (const auto& v : p.outer) slots_.add(v);
  first_dim_slot_ = slots_.size();
  for (const auto& v : p.dims) slots_.add(v);
  for (const auto& c : p.constraints) {
    for (const auto& v : c.vars()) {
      if (!slots_.contains(v)) {
        throw Error(ErrorKind::UnknownIdentifier,
                    "constraint " + c.str() + " mentions undeclared '" + v + "'");
      }
    }
  }
  checks_.resize(p.dims.size() + 1);
  if (p.empty) return;

  for (const auto& c : p.constraints) {
    std::size_t bucket = 0;
    for (const auto& v : c.vars()) {
      std::size_t s = static_cast<std::size_t>(slots_.at(v));
      if (s >= first_dim_slot_) bucket = std::max(bucket, s - first_dim_slot_ + 1);
    }
    checks_[bucket].push_back(CompiledConstraint::compile(c, slots_));
  }

  auto bounds = dim_bounds(p);
  lower_.resize(p.dims.size());
  upper_.resize(p.dims.size());
  for (std::size_t k = 0; k < p.dims.size(); ++k) {
    const auto& d = p.dims[k];
    for (const auto& c : bounds[k].lower) {
      Rational a = c.expr.coeff(d);
      AffineExpr rest = c.expr;
      rest.set_coeff(d, 0);
      lower_[k].push_back({LinearForm::compile(-rest, slots_), a.num()});
    }
    for (const auto& c : bounds[k].upper) {
      Rational a = c.expr.coeff(d);
      AffineExpr rest = c.expr;
      rest.set_coeff(d, 0);
      upper_[k].push_back({LinearForm::compile(rest, slots_), -a.num()});
    }
  }
}

template <typename Visit>
void Enumerator::scan(const Binding& binding, Visit&& visit) const {
  if (poly_.empty) return;
  std::vector<std::int64_t> values(slots_.size(), 0);
  for (std::size_t s = 0; s < first_dim_slot_; ++s) {
    const auto& name = slots_.names()[s];
    auto it = binding.find(name);
    if (it == binding.end()) {
      throw Error(ErrorKind::Binding, "no value bound for '" + name + "'");
    }
    values[s] = it->second;
  }
  for (const auto& c : checks_[0]) {
    if (!c.holds(values)) return;
  }
  const std::size_t n = poly_.dims.size();
  std::vector<std::int64_t> lo(n), hi(n);
  for (std::size_t k = 0; k < n; ++k) {
    lo[k] = std::numeric_limits<std::int64_t>::min();
    hi[k] = std::numeric_limits<std::int64_t>::max();
    for (const auto& b : lower_[k]) lo[k] = std::max(lo[k], ceil_div(b.numer.eval(values), b.div));
    for (const auto& b : upper_[k]) hi[k] = std::min(hi[k], floor_div(b.numer.eval(values), b.div));
    if (lo[k] > hi[k]) return;
  }
  if (n == 0) {
    visit(values);
    return;
  }
  // Iterative odometer over the box with per-level exact checks.
  std::size_t level = 0;
  values[first_dim_slot_] = lo[0] - 1;
  while (true) {
    std::int64_t& v = values[first_dim_slot_ + level];
    ++v;
    if (v > hi[level]) {
      if (level == 0) return;
      --level;
      continue;
    }
    bool ok = true;
    for (const auto& c : checks_[level + 1]) {
      if (!c.holds(values)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (level + 1 == n) {
      if (!visit(values)) return;
    } else {
      ++level;
      values[first_dim_slot_ + level] = lo[level] - 1;
    }
  }
}

std::vector<std::vector<std::int64_t>> Enumerator::points(const Binding& binding) const {
  std::vector<std::vector<std::int64_t>> out;
  scan(binding, [&](const std::vector<std::int64_t>& values) {
    out.emplace_back(values.begin() + static_cast<std::ptrdiff_t>(first_dim_slot_), values.end());
    return true;
  });
  return out;
}

std::int64_t Enumerator::count(const Binding& binding) const {
  std::int64_t n = 0;
  scan(binding, [&](const std::vector<std::int64_t>&) {
    ++n;
    return true;
  });
  return n;
}

bool Enumerator::any(const Binding& binding) const {
  bool found = false;
  scan(binding, [&](const std::vector<std::int64_t>&) {
    found = true;
    return false;
  });
  return found;
}

std::vector<std::vector<std::int64_t>> enumerate(const Polyhedron& p, const Binding& binding) {
  return Enumerator(p).points(binding);
}

bool rationally_empty(const Polyhedron& p) {
  return p.empty || fm::rationally_empty(p.constraints, p.params);
}

bool implies(const Polyhedron& p, const Constraint& c) {
  return p.empty || fm::implies(p.constraints, p.params, c);
}

Emptiness is_empty(const Polyhedron& p) {
  if (rationally_empty(p)) return Emptiness::Empty;
  // Witness search: outer variables become dims so they are scanned too.
  Polyhedron probe = p;
  probe.dims = concat(p.outer, p.dims);
  probe.outer.clear();
  static const std::int64_t kValues[] = {1, 2, 3, 5, 8};
  std::vector<Binding> bindings;
  const std::size_t np = probe.params.size();
  if (np <= 3) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < np; ++i) total *= std::size(kValues);
    for (std::size_t code = 0; code < total; ++code) {
      Binding b;
      std::size_t c = code;
      for (const auto& name : probe.params) {
        b[name] = kValues[c % std::size(kValues)];
        c /= std::size(kValues);
      }
      bindings.push_back(std::move(b));
    }
  } else {
    for (auto v : kValues) {
      Binding b;
      for (const auto& name : probe.params) b[name] = v;
      bindings.push_back(std::move(b));
    }
  }
  try {
    Enumerator e(probe);
    for (const auto& b : bindings) {
      if (e.any(b)) return Emptiness::NonEmpty;
    }
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::Unbounded) throw;
  }
  return Emptiness::Unknown;
}

std::vector<Polyhedron> subtract(const Polyhedron& a, const Polyhedron& b) {
  if (a.empty) return {};
  if (b.empty) return {a};
  std::vector<Polyhedron> out;
  Polyhedron prefix = a;
  for (Constraint c : b.constraints) {
    Truth t = normalize(c);
    if (t == Truth::True) continue;
    if (t == Truth::False) {
      // b is empty from here on; the rest of a survives whole.
      if (!rationally_empty(prefix)) out.push_back(prefix);
      return out;
    }
    if (c.kind == ConstraintKind::ModEq) {
      throw Error(ErrorKind::PeriodicCount,
                  "unsupported: periodic count (cannot complement " + c.str() + ")");
    }
    std::vector<Constraint> negations;
    if (c.kind == ConstraintKind::Ge) {
      negations.push_back(negate_ge(c));
    } else {
      negations.push_back(Constraint::ge(c.expr - AffineExpr(Rational(1))));
      negations.push_back(Constraint::ge(-c.expr - AffineExpr(Rational(1))));
    }
    for (auto& n : negations) {
      Polyhedron piece = prefix;
      piece.constraints.push_back(std::move(n));
      if (!rationally_empty(piece)) out.push_back(std::move(piece));
    }
    prefix.constraints.push_back(c);
    if (rationally_empty(prefix)) return out;
  }
  return out;
}

std::optional<std::vector<std::vector<Constraint>>> expand_mod(
    const std::vector<Constraint>& constraints, const std::vector<std::string>& positive) {
  constexpr int kWindow = 4;
  auto idx = std::find_if(constraints.begin(), constraints.end(),
                          [](const Constraint& c) { return c.kind == ConstraintKind::ModEq; });
  if (idx == constraints.end()) return std::vector<std::vector<Constraint>>{constraints};

  const Constraint mod = *idx;
  std::vector<Constraint> base;
  for (auto it = constraints.begin(); it != constraints.end(); ++it) {
    if (it != idx) base.push_back(*it);
  }
  if (!mod.modulus.is_constant() || !mod.residue.is_constant()) {
    // e mod m = r is unsatisfiable unless 0 <= r < m.
    base.push_back(Constraint::ge(mod.residue));
    base.push_back(Constraint::ge(mod.modulus - mod.residue - AffineExpr(Rational(1))));
  }
  if (fm::rationally_empty(base, positive)) return std::vector<std::vector<Constraint>>{};

  const AffineExpr offset = mod.expr - mod.residue;
  auto with = [&](Constraint c) {
    std::vector<Constraint> cs = base;
    cs.push_back(std::move(c));
    return cs;
  };
  std::vector<int> feasible;
  for (int t = -kWindow; t <= kWindow; ++t) {
    if (!fm::rationally_empty(with(Constraint::eq(offset - mod.modulus * Rational(t))), positive)) {
      feasible.push_back(t);
    }
  }
  int tmin = feasible.empty() ? -kWindow : feasible.front();
  int tmax = feasible.empty() ? kWindow : feasible.back();
  bool above = fm::rationally_empty(
      with(Constraint::ge(offset - mod.modulus * Rational(tmax + 1))), positive);
  bool below = fm::rationally_empty(
      with(Constraint::ge(mod.modulus * Rational(tmin - 1) - offset)), positive);
  if (!above || !below) return std::nullopt;

  std::vector<std::vector<Constraint>> out;
  for (int t : feasible) {
    auto rest = expand_mod(with(Constraint::eq(offset - mod.modulus * Rational(t))), positive);
    if (!rest) return std::nullopt;
    for (auto& alt : *rest) out.push_back(std::move(alt));
  }
  return out;
}

}  // namespace polypack
