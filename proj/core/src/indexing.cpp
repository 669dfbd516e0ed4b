#include "polypack/indexing.hpp"

#include <algorithm>
#include <sstream>

#include "polypack/error.hpp"
#include "polypack/fourier_motzkin.hpp"

namespace polypack {

IndexFunction symbolic_indexing(const Polyhedron& space, const AccessMap& access,
                                const std::string& tensor) {
  IndexFunction f;
  f.tensor = tensor;
  f.accessed = image(space, access, &f.exact);

  PiecewiseQP total;
  total.params = f.accessed.params;
  total.vars = f.accessed.dims;
  bool first = true;
  for (const auto& slice : preceding_slices(f.accessed)) {
    PiecewiseQP part = count_points(slice);
    total = first ? std::move(part) : pw_add(total, part);
    first = false;
  }
  if (first) total.pieces.push_back({{Conjunction{}}, QuasiPolynomial()});
  f.rank = fuse_piecewise(std::move(total));
  f.size = fuse_piecewise(count_points(f.accessed));
  return f;
}

std::vector<QuasiPolynomial> HoistSchedule::hoisted_constants() const {
  std::vector<QuasiPolynomial> out;
  for (const auto& level : levels) {
    for (const auto& t : level) {
      if (!t.coeff.is_constant()) out.push_back(t.coeff);
    }
  }
  return out;
}

Rational HoistSchedule::evaluate(const Binding& binding) const {
  Rational total;
  for (const auto& level : levels) {
    for (const auto& t : level) {
      Rational v = t.coeff.evaluate(binding);
      for (const auto& [name, e] : t.iters) {
        auto it = binding.find(name);
        if (it == binding.end()) throw Error(ErrorKind::Binding, "no value bound for '" + name + "'");
        for (int k = 0; k < e; ++k) v *= Rational(it->second);
      }
      total += v;
    }
  }
  return total;
}

std::string factored_str(const QuasiPolynomial& p) {
  if (p.is_constant()) return p.constant().str();
  Monomial common;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    if (first) {
      common = m;
      first = false;
      continue;
    }
    Monomial next;
    for (const auto& [v, e] : common) {
      auto it = m.find(v);
      if (it != m.end()) next[v] = std::min(e, it->second);
    }
    common = std::move(next);
  }
  if (p.terms().size() == 1) return p.str();
  if (common.empty()) return "(" + p.str() + ")";
  QuasiPolynomial rest;
  for (const auto& [m, c] : p.terms()) {
    Monomial r = m;
    for (const auto& [v, e] : common) {
      if ((r[v] -= e) == 0) r.erase(v);
    }
    QuasiPolynomial term(c);
    for (const auto& [v, e] : r) term *= QuasiPolynomial::var(v).pow(e);
    rest += term;
  }
  std::string out = "(" + rest.str() + ")";
  for (const auto& [v, e] : common) {
    out += "*" + v;
    if (e > 1) out += "^" + std::to_string(e);
  }
  return out;
}

std::string HoistSchedule::str() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (levels[k].empty()) continue;
    os << "level " << (k == 0 ? std::string("0") : dims[k - 1]) << ":";
    for (const auto& t : levels[k]) {
      bool negative = t.coeff.terms().size() == 1 && t.coeff.terms().begin()->second.sign() < 0;
      const QuasiPolynomial coeff = negative ? -t.coeff : t.coeff;
      os << (negative ? " - " : " + ");
      bool unit = coeff == QuasiPolynomial(Rational(1));
      if (!unit || t.iters.empty()) os << factored_str(coeff);
      bool star = !unit || t.iters.empty();
      for (const auto& [v, e] : t.iters) {
        if (star) os << "*";
        os << v;
        if (e > 1) os << "^" << e;
        star = true;
      }
    }
    os << "\n";
  }
  return os.str();
}

HoistSchedule hoist_schedule(const QuasiPolynomial& rank, const std::vector<std::string>& dims) {
  HoistSchedule h;
  h.dims = dims;
  h.levels.resize(dims.size() + 1);
  for (const auto& [m, c] : rank.terms()) {
    Monomial iters, syms;
    std::size_t level = 0;
    for (const auto& [v, e] : m) {
      auto it = std::find(dims.begin(), dims.end(), v);
      if (it == dims.end()) {
        syms[v] = e;
      } else {
        iters[v] = e;
        level = std::max(level, static_cast<std::size_t>(it - dims.begin()) + 1);
      }
    }
    QuasiPolynomial coeff(c);
    for (const auto& [v, e] : syms) coeff *= QuasiPolynomial::var(v).pow(e);
    auto& terms = h.levels[level];
    auto found = std::find_if(terms.begin(), terms.end(),
                              [&](const HoistTerm& t) { return t.iters == iters; });
    if (found == terms.end()) {
      terms.push_back({coeff, iters});
    } else {
      found->coeff += coeff;
    }
  }
  return h;
}

Polyhedron coordinate_domain(const Polyhedron& accessed, const std::vector<std::string>& indices) {
  std::map<std::string, std::string> rename;
  Polyhedron out;
  for (std::size_t p = 0; p < indices.size(); ++p) {
    rename[indices[p]] = "$" + std::to_string(p);
    out.dims.push_back("$" + std::to_string(p));
  }
  out.params = accessed.params;
  out.outer = accessed.outer;
  out.empty = accessed.empty;
  for (const auto& c : accessed.constraints) out.constraints.push_back(c.rename(rename));
  return out;
}

namespace {

std::vector<Constraint> canonical(const Polyhedron& p) {
  fm::System sys;
  sys.constraints = p.constraints;
  fm::simplify(sys);
  std::sort(sys.constraints.begin(), sys.constraints.end());
  return sys.constraints;
}

std::vector<std::string> union_names(std::vector<std::string> a, const std::vector<std::string>& b) {
  for (const auto& n : b) {
    if (std::find(a.begin(), a.end(), n) == a.end()) a.push_back(n);
  }
  return a;
}

bool implies_all(const Polyhedron& a, const Polyhedron& b, const std::vector<std::string>& params) {
  return std::all_of(b.constraints.begin(), b.constraints.end(), [&](const Constraint& c) {
    return fm::implies(a.constraints, params, c);
  });
}

}  // namespace

RegionRelation compare_regions(const Polyhedron& a, const Polyhedron& b) {
  if (a.empty && b.empty) return RegionRelation::Equal;
  if (a.empty || b.empty) return RegionRelation::Disjoint;
  const auto params = union_names(a.params, b.params);
  if (canonical(a) == canonical(b)) return RegionRelation::Equal;
  if (implies_all(a, b, params) && implies_all(b, a, params)) return RegionRelation::Equal;

  Polyhedron pa = a, pb = b;
  pa.params = pb.params = params;
  bool same = true, any = false;
  try {
    Enumerator ea(pa), eb(pb);
    for (std::int64_t probe : {2, 3, 5}) {
      Binding binding;
      for (const auto& p : params) binding[p] = probe;
      auto xa = ea.points(binding);
      if (xa != eb.points(binding)) {
        same = false;
        break;
      }
      any = any || !xa.empty();
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Unbounded) throw;
    same = false;
  }
  if (same && any) return RegionRelation::Equal;

  std::vector<Constraint> both = a.constraints;
  both.insert(both.end(), b.constraints.begin(), b.constraints.end());
  if (fm::rationally_empty(both, params)) return RegionRelation::Disjoint;
  return RegionRelation::Overlap;
}

const Buffer& BufferRegistry::buffer_for(const AccessRef& ref) const {
  auto it = assignment.find(ref);
  if (it == assignment.end()) {
    throw Error(ErrorKind::UnknownIdentifier, "access has no buffer assignment");
  }
  return buffers.at(static_cast<std::size_t>(it->second));
}

std::vector<int> BufferRegistry::buffers_of(const std::string& tensor) const {
  std::vector<int> out;
  for (const auto& b : buffers) {
    if (b.tensor == tensor) out.push_back(b.id);
  }
  return out;
}

std::string BufferRegistry::dump() const {
  std::ostringstream os;
  for (const auto& b : buffers) {
    os << "tensor=" << b.tensor << " id=" << b.id;
    if (b.dense) {
      os << " dense reason=" << b.reason << " shape=(";
      for (std::size_t k = 0; k < b.shape.size(); ++k) os << (k ? ", " : "") << b.shape[k].str();
      os << ")\n";
      continue;
    }
    os << " size=" << b.index.size.str() << " rank=" << b.index.rank.str()
       << " domain=" << to_string(b.index.accessed.constraints) << "\n";
  }
  return os.str();
}

BufferRegistry build_registry(const std::vector<SummandSpace>& summands,
                              const std::set<std::string>& compressed,
                              const std::map<std::string, std::vector<AffineExpr>>& shapes) {
  // Accesses grouped by tensor, tensors in first-appearance order.
  std::vector<std::string> tensors;
  std::map<std::string, std::vector<AccessRef>> refs;
  for (std::size_t s = 0; s < summands.size(); ++s) {
    const Summand& sm = summands[s].summand;
    for (std::size_t k = 0; k <= sm.inputs.size(); ++k) {
      const Access& a = k == 0 ? sm.output : sm.inputs[k - 1];
      if (!refs.count(a.tensor)) tensors.push_back(a.tensor);
      refs[a.tensor].push_back({s, k});
    }
  }
  auto access_of = [&](const AccessRef& r) -> const Access& {
    const Summand& sm = summands[r.first].summand;
    return r.second == 0 ? sm.output : sm.inputs[r.second - 1];
  };

  BufferRegistry reg;
  auto dense_buffer = [&](const std::string& tensor, const std::string& reason) {
    Buffer b;
    b.id = static_cast<int>(reg.buffers.size());
    b.tensor = tensor;
    b.dense = true;
    b.reason = reason;
    auto it = shapes.find(tensor);
    if (it == shapes.end()) {
      throw Error(ErrorKind::UnknownIdentifier, "no shape known for dense tensor '" + tensor + "'");
    }
    b.shape = it->second;
    for (const auto& r : refs[tensor]) reg.assignment[r] = b.id;
    reg.buffers.push_back(std::move(b));
  };

  for (const auto& tensor : tensors) {
    if (!compressed.count(tensor)) {
      dense_buffer(tensor, "uncompressed");
      continue;
    }
    struct Group {
      Polyhedron region;
      Buffer buffer;
    };
    std::vector<Group> groups;
    std::map<AccessRef, std::size_t> local;
    bool overlap = false;
    for (const auto& r : refs[tensor]) {
      const Access& a = access_of(r);
      const Polyhedron& space = summands[r.first].space;
      Polyhedron region = coordinate_domain(image(space, AccessMap{a.indices}), a.indices);
      std::optional<std::size_t> match;
      for (std::size_t g = 0; g < groups.size() && !overlap; ++g) {
        switch (compare_regions(groups[g].region, region)) {
          case RegionRelation::Equal:
            if (!match) match = g;
            break;
          case RegionRelation::Disjoint:
            break;
          case RegionRelation::Overlap:
            overlap = true;
            break;
        }
      }
      if (overlap) break;
      if (!match) {
        Group g;
        g.region = std::move(region);
        g.buffer.tensor = tensor;
        g.buffer.index = symbolic_indexing(space, AccessMap{a.indices}, tensor);
        g.buffer.coords = a.indices;
        groups.push_back(std::move(g));
        match = groups.size() - 1;
      }
      local[r] = *match;
    }
    if (overlap) {
      dense_buffer(tensor, "partial-overlap");
      continue;
    }
    const int base = static_cast<int>(reg.buffers.size());
    for (auto& g : groups) {
      g.buffer.id = static_cast<int>(reg.buffers.size());
      reg.buffers.push_back(std::move(g.buffer));
    }
    for (const auto& [r, g] : local) reg.assignment[r] = base + static_cast<int>(g);
  }
  return reg;
}

}  // namespace polypack
