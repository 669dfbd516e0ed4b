#include "oracle.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace oracle {

using polypack::Binding;
using polypack::Constraint;

std::vector<Point> box_points(const std::vector<std::string>& dims,
                              const std::vector<Constraint>& constraints, const Binding& fixed,
                              std::int64_t lo, std::int64_t hi) {
  // Bucket k holds the constraints whose deepest dim is dims[k-1].
  std::vector<std::vector<const Constraint*>> buckets(dims.size() + 1);
  for (const auto& c : constraints) {
    std::size_t depth = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (c.mentions(dims[k])) depth = k + 1;
    }
    buckets[depth].push_back(&c);
  }
  std::vector<Point> out;
  Binding b = fixed;
  for (const auto* c : buckets[0]) {
    if (!c->holds(b)) return out;
  }
  Point cur(dims.size());
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == dims.size()) {
      out.push_back(cur);
      return;
    }
    for (std::int64_t v = lo; v <= hi; ++v) {
      b[dims[k]] = v;
      cur[k] = v;
      bool ok = true;
      for (const auto* c : buckets[k + 1]) {
        if (!c->holds(b)) {
          ok = false;
          break;
        }
      }
      if (ok) rec(k + 1);
    }
    b.erase(dims[k]);
  };
  rec(0);
  return out;
}

std::int64_t max_value(const Binding& binding) {
  std::int64_t m = 1;
  for (const auto& [_, v] : binding) m = std::max(m, v);
  return m;
}

std::vector<Point> points(const polypack::Polyhedron& p, const Binding& binding) {
  if (p.empty) return {};
  return box_points(p.dims, p.constraints, binding, -2, max_value(binding) + 2);
}

Binding with_point(Binding b, const std::vector<std::string>& names, const Point& point) {
  for (std::size_t k = 0; k < names.size(); ++k) b[names[k]] = point[k];
  return b;
}

std::vector<Binding> small_bindings(const std::vector<std::string>& symbols, std::size_t limit,
                                    std::uint64_t seed) {
  std::vector<Binding> out;
  std::size_t total = 1;
  for (std::size_t k = 0; k < symbols.size() && total <= limit; ++k) total *= 8;
  if (total <= limit) {
    std::vector<std::int64_t> v(symbols.size(), 1);
    for (;;) {
      Binding b;
      for (std::size_t k = 0; k < symbols.size(); ++k) b[symbols[k]] = v[k];
      out.push_back(b);
      std::size_t k = 0;
      while (k < v.size() && ++v[k] > 8) v[k++] = 1;
      if (k == v.size()) break;
    }
    return out;
  }
  std::set<Binding> seen;
  for (std::int64_t n = 1; n <= 8; ++n) {
    Binding b;
    for (const auto& s : symbols) b[s] = n;
    if (seen.insert(b).second) out.push_back(b);
  }
  Gen g(seed);
  while (out.size() < limit) {
    Binding b;
    for (const auto& s : symbols) b[s] = g.integer(1, 8);
    if (seen.insert(b).second) out.push_back(b);
  }
  return out;
}

polypack::Rational direct_sum(const polypack::QuasiPolynomial& p, const std::string& v,
                              std::int64_t lb, std::int64_t ub, Binding binding) {
  polypack::Rational total;
  for (std::int64_t x = lb; x <= ub; ++x) {
    binding[v] = x;
    total += p.evaluate(binding);
  }
  return total;
}

polypack::QuasiPolynomial Gen::polynomial(const std::vector<std::string>& vars, int degree,
                                          int terms) {
  polypack::QuasiPolynomial p;
  for (int t = 0; t < terms; ++t) {
    polypack::QuasiPolynomial m = rational(5, 4);
    const int d = static_cast<int>(integer(0, degree));
    for (int e = 0; e < d; ++e) m *= polypack::QuasiPolynomial::var(pick(vars));
    p += m;
  }
  return p;
}

polypack::AffineExpr Gen::affine(const std::vector<std::string>& vars, std::int64_t range) {
  polypack::AffineExpr e(polypack::Rational(integer(-range, range)));
  for (const auto& v : vars) e += polypack::AffineExpr::var(v, polypack::Rational(integer(-2, 2)));
  return e;
}

}  // namespace oracle
