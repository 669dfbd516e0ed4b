#include "polypack/counting.hpp"

#include <algorithm>
#include <sstream>

#include "polypack/error.hpp"
#include "polypack/fourier_motzkin.hpp"

namespace polypack {

namespace {

struct Leaf {
  Conjunction constraints;
  QuasiPolynomial poly;
};

bool conj_empty(const Conjunction& c, const std::vector<std::string>& params) {
  return fm::rationally_empty(c, params);
}

Conjunction concat(Conjunction a, const Conjunction& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<std::string> merge_names(std::vector<std::string> a,
                                     const std::vector<std::string>& b) {
  for (const auto& n : b) {
    if (std::find(a.begin(), a.end(), n) == a.end()) a.push_back(n);
  }
  return a;
}

// Equality pivot for `v`: integral substitution or a periodic count.
AffineExpr solve_for(const Constraint& eq, const std::string& v) {
  Rational a = eq.expr.coeff(v);
  AffineExpr rest = eq.expr;
  rest.set_coeff(v, 0);
  AffineExpr value = rest * (Rational(-1) / a);
  if (!value.has_integer_coeffs()) {
    throw Error(ErrorKind::PeriodicCount,
                "unsupported: periodic count (equality " + eq.str() + " on '" + v + "')");
  }
  return value;
}

void eliminate_dims(Conjunction cons, QuasiPolynomial poly, std::vector<std::string> dims,
                    const std::vector<std::string>& params, int max_degree,
                    std::vector<Leaf>& out) {
  fm::System sys;
  sys.constraints = std::move(cons);
  fm::simplify(sys);
  if (sys.infeasible || poly.is_zero()) return;
  cons = std::move(sys.constraints);
  if (conj_empty(cons, params)) return;
  if (dims.empty()) {
    out.push_back({std::move(cons), std::move(poly)});
    return;
  }
  const std::string v = dims.back();
  dims.pop_back();

  // Equality: a single value, unit pivot preferred.
  const Constraint* pivot = nullptr;
  for (const auto& c : cons) {
    if (c.kind != ConstraintKind::Eq || !c.expr.mentions(v)) continue;
    if (!pivot || c.expr.coeff(v).abs() < pivot->expr.coeff(v).abs()) pivot = &c;
  }
  if (pivot) {
    AffineExpr value = solve_for(*pivot, v);
    Constraint chosen = *pivot;
    Conjunction next;
    for (const auto& c : cons) {
      if (c == chosen) continue;
      next.push_back(c.substitute(v, value));
    }
    eliminate_dims(std::move(next), poly.substitute(v, value), std::move(dims), params,
                   max_degree, out);
    return;
  }

  std::vector<AffineExpr> lowers, uppers;
  Conjunction others;
  for (const auto& c : cons) {
    if (!c.mentions(v)) {
      others.push_back(c);
      continue;
    }
    Rational a = c.expr.coeff(v);
    if (c.kind == ConstraintKind::ModEq || a.abs() != Rational(1)) {
      throw Error(ErrorKind::PeriodicCount,
                  "unsupported: periodic count (constraint " + c.str() + " on '" + v + "')");
    }
    AffineExpr rest = c.expr;
    rest.set_coeff(v, 0);
    if (a.sign() > 0) {
      lowers.push_back(-rest);
    } else {
      uppers.push_back(rest);
    }
  }
  if (lowers.empty() || uppers.empty()) {
    throw Error(ErrorKind::Unbounded, "unbounded iterator '" + v + "' while counting");
  }

  // Drop bounds another bound dominates everywhere in the context.
  auto prune = [&](std::vector<AffineExpr>& bounds, bool lower) {
    std::vector<bool> dropped(bounds.size(), false);
    for (std::size_t k = 0; k < bounds.size(); ++k) {
      for (std::size_t o = 0; o < bounds.size(); ++o) {
        if (o == k || dropped[o]) continue;
        AffineExpr diff = lower ? bounds[o] - bounds[k] : bounds[k] - bounds[o];
        if (fm::implies(others, params, Constraint::ge(diff))) {
          dropped[k] = true;
          break;
        }
      }
    }
    std::vector<AffineExpr> kept;
    for (std::size_t k = 0; k < bounds.size(); ++k) {
      if (!dropped[k]) kept.push_back(bounds[k]);
    }
    bounds = std::move(kept);
  };
  prune(lowers, true);
  prune(uppers, false);

  const AffineExpr one(Rational(1));
  for (std::size_t p = 0; p < lowers.size(); ++p) {
    for (std::size_t q = 0; q < uppers.size(); ++q) {
      Conjunction piece = others;
      // Ties go to the earlier bound.
      for (std::size_t o = 0; o < lowers.size(); ++o) {
        if (o < p) piece.push_back(Constraint::ge(lowers[p] - lowers[o] - one));
        if (o > p) piece.push_back(Constraint::ge(lowers[p] - lowers[o]));
      }
      for (std::size_t o = 0; o < uppers.size(); ++o) {
        if (o < q) piece.push_back(Constraint::ge(uppers[o] - uppers[q] - one));
        if (o > q) piece.push_back(Constraint::ge(uppers[o] - uppers[q]));
      }
      piece.push_back(Constraint::ge(uppers[q] - lowers[p]));
      eliminate_dims(std::move(piece),
                     faulhaber_sum(poly, v, lowers[p], uppers[q], max_degree), dims, params,
                     max_degree, out);
    }
  }
}

// Disjoint conjunctions covering `u` minus `v`.
std::vector<Conjunction> minus(const std::vector<Conjunction>& u, const Conjunction& v,
                               const std::vector<std::string>& vars,
                               const std::vector<std::string>& params) {
  std::vector<Conjunction> out;
  Polyhedron pv = domain_polyhedron(v, vars, params);
  for (const auto& c : u) {
    for (auto& piece : subtract(domain_polyhedron(c, vars, params), pv)) {
      fm::System sys;
      sys.constraints = std::move(piece.constraints);
      fm::simplify(sys);
      if (!sys.infeasible) out.push_back(std::move(sys.constraints));
    }
  }
  return out;
}

std::vector<Conjunction> minus_all(std::vector<Conjunction> u,
                                   const std::vector<Piece>& pieces,
                                   const std::vector<std::string>& vars,
                                   const std::vector<std::string>& params) {
  for (const auto& p : pieces) {
    for (const auto& c : p.domain) {
      if (u.empty()) return u;
      u = minus(u, c, vars, params);
    }
  }
  return u;
}

// Sum on the common refinement without any merging.
PiecewiseQP refine_add(const PiecewiseQP& a, const PiecewiseQP& b) {
  PiecewiseQP out;
  out.params = merge_names(a.params, b.params);
  out.vars = merge_names(a.vars, b.vars);
  for (const auto& pa : a.pieces) {
    for (const auto& pb : b.pieces) {
      Piece piece;
      for (const auto& ca : pa.domain) {
        for (const auto& cb : pb.domain) {
          fm::System both;
          both.constraints = concat(ca, cb);
          fm::simplify(both);
          if (both.infeasible || conj_empty(both.constraints, out.params)) continue;
          piece.domain.push_back(std::move(both.constraints));
        }
      }
      if (piece.domain.empty()) continue;
      piece.poly = pa.poly + pb.poly;
      out.pieces.push_back(std::move(piece));
    }
  }
  for (const auto& pa : a.pieces) {
    auto rest = minus_all(pa.domain, b.pieces, out.vars, out.params);
    if (!rest.empty()) out.pieces.push_back({std::move(rest), pa.poly});
  }
  for (const auto& pb : b.pieces) {
    auto rest = minus_all(pb.domain, a.pieces, out.vars, out.params);
    if (!rest.empty()) out.pieces.push_back({std::move(rest), pb.poly});
  }
  return out;
}

// Pieces with identical polynomials share one union domain.
void merge_identical(PiecewiseQP& pw) {
  std::vector<Piece> out;
  for (auto& p : pw.pieces) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const Piece& o) { return o.poly == p.poly; });
    if (it == out.end()) {
      out.push_back(std::move(p));
    } else {
      it->domain.insert(it->domain.end(), p.domain.begin(), p.domain.end());
    }
  }
  pw.pieces = std::move(out);
}

bool vanishes_on_union(const QuasiPolynomial& q, const std::vector<Conjunction>& domain,
                       const PiecewiseQP& pw) {
  return std::all_of(domain.begin(), domain.end(), [&](const Conjunction& c) {
    return vanishes_on(q, c, pw.vars, pw.params);
  });
}

void absorb_zero_pieces(PiecewiseQP& pw) {
  std::vector<bool> gone(pw.pieces.size(), false);
  for (std::size_t z = 0; z < pw.pieces.size(); ++z) {
    if (!pw.pieces[z].poly.is_zero()) continue;
    std::optional<std::size_t> best;
    for (std::size_t x = 0; x < pw.pieces.size(); ++x) {
      if (gone[x] || pw.pieces[x].poly.is_zero()) continue;
      if (best && pw.pieces[x].poly.terms().size() >= pw.pieces[*best].poly.terms().size()) {
        continue;
      }
      if (vanishes_on_union(pw.pieces[x].poly, pw.pieces[z].domain, pw)) best = x;
    }
    if (!best) continue;
    auto& target = pw.pieces[*best].domain;
    target.insert(target.end(), pw.pieces[z].domain.begin(), pw.pieces[z].domain.end());
    gone[z] = true;
  }
  std::vector<Piece> kept;
  for (std::size_t k = 0; k < pw.pieces.size(); ++k) {
    if (!gone[k]) kept.push_back(std::move(pw.pieces[k]));
  }
  pw.pieces = std::move(kept);
}

}  // namespace

Polyhedron domain_polyhedron(const Conjunction& c, const std::vector<std::string>& vars,
                             const std::vector<std::string>& params) {
  Polyhedron p;
  p.dims = vars;
  p.params = params;
  p.constraints = c;
  return p;
}

std::int64_t PiecewiseQP::evaluate(const Binding& binding) const {
  for (const auto& piece : pieces) {
    for (const auto& conj : piece.domain) {
      bool inside = std::all_of(conj.begin(), conj.end(),
                                [&](const Constraint& c) { return c.holds(binding); });
      if (!inside) continue;
      Rational v = piece.poly.evaluate(binding);
      if (!v.is_integer()) {
        throw Error(ErrorKind::NonIntegral,
                    "count evaluated to non-integer " + v.str() + " (" + piece.poly.str() + ")");
      }
      return v.num();
    }
  }
  throw Error(ErrorKind::Domain, "point outside every piece of " + str());
}

std::int64_t PiecewiseQP::evaluate_or(const Binding& binding, std::int64_t fallback) const {
  try {
    return evaluate(binding);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Domain) throw;
    return fallback;
  }
}

std::string PiecewiseQP::str() const {
  if (pieces.empty()) return "0";
  if (pieces.size() == 1) return pieces.front().poly.str();
  std::ostringstream os;
  os << "{ ";
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    if (k) os << "; ";
    os << pieces[k].poly.str() << " if ";
    for (std::size_t d = 0; d < pieces[k].domain.size(); ++d) {
      if (d) os << " or ";
      os << to_string(pieces[k].domain[d]);
    }
  }
  os << " }";
  return os.str();
}

PiecewiseQP count_points(const Polyhedron& p, const std::vector<std::string>& count_dims,
                         int max_degree) {
  for (const auto& d : count_dims) {
    if (std::find(p.dims.begin(), p.dims.end(), d) == p.dims.end()) {
      throw Error(ErrorKind::UnknownIdentifier, "cannot count over '" + d + "': not a dim");
    }
  }
  PiecewiseQP result;
  result.params = p.params;
  result.vars = p.outer;
  std::vector<std::string> counted;
  for (const auto& d : p.dims) {
    if (std::find(count_dims.begin(), count_dims.end(), d) == count_dims.end()) {
      result.vars.push_back(d);
    } else {
      counted.push_back(d);
    }
  }
  if (p.empty) {
    result.pieces.push_back({{Conjunction{}}, QuasiPolynomial()});
    return result;
  }

  Conjunction context;
  for (const auto& c : p.constraints) {
    bool uses_counted = std::any_of(counted.begin(), counted.end(),
                                    [&](const std::string& d) { return c.mentions(d); });
    if (!uses_counted) context.push_back(c);
  }

  if (p.has_mod()) {
    // Disjoint mod-free alternatives, counted separately and summed.
    auto alternatives = expand_mod(p.constraints, p.params);
    if (!alternatives) {
      throw Error(ErrorKind::PeriodicCount,
                  "unsupported: periodic count (mod constraint in " + p.str() + ")");
    }
    bool first = true;
    for (auto& alt : *alternatives) {
      Polyhedron q = p;
      q.constraints = std::move(alt);
      PiecewiseQP part = count_points(q, count_dims, max_degree);
      result = first ? std::move(part) : pw_add(result, part);
      first = false;
    }
    // Context points that no alternative reaches count zero. Mods left in
    // the context only involve uncounted variables and are expanded too.
    auto context_alts = expand_mod(context, p.params);
    if (!context_alts) {
      throw Error(ErrorKind::PeriodicCount,
                  "unsupported: periodic count (mod constraint in " + to_string(context) + ")");
    }
    std::vector<Conjunction> zero_domain;
    for (auto& c : minus_all(*context_alts, result.pieces, result.vars, result.params)) {
      if (!conj_empty(c, result.params)) zero_domain.push_back(std::move(c));
    }
    if (!zero_domain.empty()) {
      PiecewiseQP zero;
      zero.params = result.params;
      zero.vars = result.vars;
      zero.pieces.push_back({std::move(zero_domain), QuasiPolynomial()});
      result = first ? std::move(zero) : pw_add(result, zero);
    }
    if (result.pieces.empty()) result.pieces.push_back({{Conjunction{}}, QuasiPolynomial()});
    return result;
  }

  auto alternatives = expand_mod(p.constraints, p.params);
  if (!alternatives) {
    throw Error(ErrorKind::PeriodicCount,
                "unsupported: periodic count (mod constraint in " + p.str() + ")");
  }
  std::vector<Leaf> leaves;
  for (auto& alt : *alternatives) {
    eliminate_dims(std::move(alt), QuasiPolynomial(Rational(1)), counted, p.params, max_degree,
                   leaves);
  }
  for (auto& leaf : leaves) {
    PiecewiseQP one;
    one.params = result.params;
    one.vars = result.vars;
    one.pieces.push_back({{std::move(leaf.constraints)}, std::move(leaf.poly)});
    result = refine_add(result, one);
    merge_identical(result);
  }

  auto uncovered = minus_all({context}, result.pieces, result.vars, result.params);
  std::vector<Conjunction> zero_domain;
  for (auto& c : uncovered) {
    if (!conj_empty(c, result.params)) zero_domain.push_back(std::move(c));
  }
  if (!zero_domain.empty()) result.pieces.push_back({std::move(zero_domain), QuasiPolynomial()});
  return result;
}

PiecewiseQP count_points(const Polyhedron& p, int max_degree) {
  return count_points(p, p.dims, max_degree);
}

PiecewiseQP pw_add(const PiecewiseQP& a, const PiecewiseQP& b) {
  PiecewiseQP out = refine_add(a, b);
  merge_identical(out);
  absorb_zero_pieces(out);
  return out;
}

bool vanishes_on(const QuasiPolynomial& q, const Conjunction& domain,
                 const std::vector<std::string>& vars, const std::vector<std::string>& params) {
  if (q.is_zero()) return true;
  fm::System sys;
  sys.constraints = domain;
  fm::simplify(sys);
  if (sys.infeasible) return true;

  std::vector<AffineExpr> equalities;
  for (const auto& c : sys.constraints) {
    if (c.kind == ConstraintKind::Eq) {
      equalities.push_back(c.expr);
    } else if (c.kind == ConstraintKind::Ge) {
      Conjunction tighter = sys.constraints;
      tighter.push_back(Constraint::ge(c.expr - AffineExpr(Rational(1))));
      if (fm::rationally_empty(tighter, params)) equalities.push_back(c.expr);
    }
  }
  QuasiPolynomial r = q;
  for (std::size_t k = 0; k < equalities.size(); ++k) {
    const AffineExpr& e = equalities[k];
    if (e.is_constant()) continue;
    // Prefer eliminating a non-symbol variable.
    std::string pivot = e.coeffs().begin()->first;
    for (const auto& [name, c] : e.coeffs()) {
      if (std::find(vars.begin(), vars.end(), name) != vars.end()) pivot = name;
    }
    AffineExpr rest = e;
    Rational a = e.coeff(pivot);
    rest.set_coeff(pivot, 0);
    AffineExpr value = rest * (Rational(-1) / a);
    r = r.substitute(pivot, value);
    for (std::size_t o = k + 1; o < equalities.size(); ++o) {
      equalities[o] = equalities[o].substitute(pivot, value);
    }
  }
  if (r.is_zero()) return true;

  // Fallback: exact check over small symbol bindings.
  Polyhedron dom = domain_polyhedron(domain, vars, params);
  // Product grid over the symbols that matter, as fine as a fixed budget allows.
  std::vector<std::string> relevant;
  for (const auto& name : params) {
    bool used = q.mentions(name) || std::any_of(domain.begin(), domain.end(), [&](const Constraint& c) {
      return c.mentions(name);
    });
    if (used) relevant.push_back(name);
  }
  constexpr std::size_t kBudget = 1500;
  std::int64_t range = 6;
  auto grid_size = [&](std::int64_t r) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < relevant.size() && total <= kBudget; ++i) total *= static_cast<std::size_t>(r);
    return total;
  };
  while (range > 2 && grid_size(range) > kBudget) --range;
  std::vector<Binding> bindings;
  const std::size_t total = grid_size(range);
  for (std::size_t code = 0; code < total; ++code) {
    Binding b;
    for (const auto& name : params) b[name] = 1;
    std::size_t c = code;
    for (const auto& name : relevant) {
      b[name] = static_cast<std::int64_t>(c % static_cast<std::size_t>(range)) + 1;
      c /= static_cast<std::size_t>(range);
    }
    bindings.push_back(std::move(b));
  }
  bool any_point = false;
  try {
    Enumerator e(dom);
    for (const auto& b : bindings) {
      for (const auto& pt : e.points(b)) {
        Binding full = b;
        for (std::size_t i = 0; i < vars.size(); ++i) full[vars[i]] = pt[i];
        if (!q.evaluate(full).is_zero()) return false;
        any_point = true;
      }
    }
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::Unbounded) throw;
    return false;
  }
  return any_point;
}

PiecewiseQP fuse_piecewise(PiecewiseQP t) {
  auto& pieces = t.pieces;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    std::size_t j = 0;
    while (j < pieces.size()) {
      if (j == i) {
        ++j;
        continue;
      }
      QuasiPolynomial diff = pieces[i].poly - pieces[j].poly;
      if (!vanishes_on_union(diff, pieces[j].domain, t)) {
        ++j;
        continue;
      }
      auto moved = std::move(pieces[j].domain);
      pieces[i].domain.insert(pieces[i].domain.end(), moved.begin(), moved.end());
      pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(j));
      if (j < i) --i;
    }
  }
  return t;
}

CompiledPiecewise::CompiledPiecewise(const PiecewiseQP& pw, const SlotMap& slots) {
  for (const auto& piece : pw.pieces) {
    CompiledPiece cp;
    for (const auto& conj : piece.domain) {
      std::vector<CompiledConstraint> cc;
      for (const auto& c : conj) cc.push_back(CompiledConstraint::compile(c, slots));
      cp.domain.push_back(std::move(cc));
    }
    cp.poly = CompiledPolynomial(piece.poly, slots);
    pieces_.push_back(std::move(cp));
  }
}

std::optional<std::int64_t> CompiledPiecewise::try_eval(
    std::span<const std::int64_t> values) const {
  for (const auto& piece : pieces_) {
    for (const auto& conj : piece.domain) {
      bool inside = std::all_of(conj.begin(), conj.end(),
                                [&](const CompiledConstraint& c) { return c.holds(values); });
      if (inside) return piece.poly.eval(values);
    }
  }
  return std::nullopt;
}

std::int64_t CompiledPiecewise::eval(std::span<const std::int64_t> values) const {
  auto v = try_eval(values);
  if (!v) throw Error(ErrorKind::Domain, "point outside every piece");
  return *v;
}

}  // namespace polypack
