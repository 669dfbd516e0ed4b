#include "polypack/codegen.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "polypack/error.hpp"
#include "polypack/fourier_motzkin.hpp"

namespace polypack {

namespace {

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Level of a constraint: index of its innermost dim, or -1 when dim-free.
int innermost_level(const Constraint& c, const std::vector<std::string>& dims) {
  int level = -1;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (c.mentions(dims[k])) level = static_cast<int>(k);
  }
  return level;
}

std::string bound_text(const LoopBound& b, bool lower) {
  if (b.div == 1) return b.numer.str();
  return std::string(lower ? "ceil" : "floor") + "((" + b.numer.str() + ")/" +
         std::to_string(b.div) + ")";
}

std::string bound_list(const std::vector<LoopBound>& bs, bool lower) {
  if (bs.size() == 1) return bound_text(bs[0], lower);
  std::string out = lower ? "max(" : "min(";
  for (std::size_t k = 0; k < bs.size(); ++k) out += (k ? ", " : "") + bound_text(bs[k], lower);
  return out + ")";
}

}  // namespace

LoopNest build_loop_nest(const Polyhedron& space) {
  LoopNest nest;
  nest.params = concat(space.params, space.outer);
  nest.empty = space.empty || rationally_empty(space);
  const auto& dims = space.dims;

  std::vector<Constraint> originals;
  auto keep_constraint = [&](Constraint c) {
    Truth t = normalize(c);
    if (t == Truth::True) return;
    if (t == Truth::False) nest.empty = true;
    originals.push_back(std::move(c));
  };
  for (const auto& c : space.constraints) {
    keep_constraint(c);
    // A stride alone would accept residues outside [0, modulus).
    if (c.kind == ConstraintKind::ModEq) {
      keep_constraint(Constraint::ge(c.residue));
      keep_constraint(Constraint::ge(c.modulus - c.residue - AffineExpr(Rational(1))));
    }
  }
  for (const auto& c : originals) {
    if (innermost_level(c, dims) < 0) nest.guards.push_back(c);
  }

  for (std::size_t k = 0; k < dims.size(); ++k) {
    const std::string& d = dims[k];
    fm::System sys;
    sys.constraints = originals;
    std::vector<std::string> keep = nest.params;
    keep.insert(keep.end(), dims.begin(), dims.begin() + static_cast<long>(k) + 1);
    fm::project_onto(sys, keep, fm::ModPolicy::Drop);
    if (sys.infeasible) nest.empty = true;

    LoopLevel level;
    level.iter = d;
    std::vector<Constraint> used;
    for (const auto& c : sys.constraints) {
      if (!c.mentions(d)) continue;
      Rational a = c.expr.coeff(d);
      AffineExpr rest = c.expr - AffineExpr::var(d, a);
      if (c.kind == ConstraintKind::Ge) {
        if (a.sign() > 0) {
          level.lower.push_back({-rest, a.num()});
        } else {
          level.upper.push_back({rest, (-a).num()});
        }
        used.push_back(c);
      } else if (c.kind == ConstraintKind::Eq) {
        if (a.sign() < 0) {
          a = -a;
          rest = -rest;
        }
        level.lower.push_back({-rest, a.num()});
        level.upper.push_back({-rest, a.num()});
        if (a == Rational(1)) level.single = true;
        used.push_back(c);
      } else if (!level.strided && (a == Rational(1) || a == Rational(-1)) &&
                 std::none_of(c.modulus.coeffs().begin(), c.modulus.coeffs().end(),
                              [&](const auto& kv) {
                                return std::find(dims.begin() + static_cast<long>(k), dims.end(),
                                                 kv.first) != dims.end();
                              })) {
        level.strided = true;
        level.modulus = c.modulus;
        level.target = (c.residue - rest) * a;
        used.push_back(c);
      }
    }
    if (level.lower.empty() || level.upper.empty()) {
      throw Error(ErrorKind::Unbounded, "unbounded iterator '" + d + "'");
    }
    if (level.single && (level.lower.size() > 1 || level.upper.size() > 1)) {
      // Keep only the defining equality as bound; other bounds become guards.
      auto is_eq = [&](const Constraint& c) { return c.kind == ConstraintKind::Eq && c.mentions(d); };
      auto eq = std::find_if(used.begin(), used.end(), is_eq);
      Rational a = eq->expr.coeff(d);
      AffineExpr rest = eq->expr - AffineExpr::var(d, a);
      if (a.sign() < 0) rest = -rest;
      for (const auto& c : used) {
        if (c.kind == ConstraintKind::Ge) level.guards.push_back(c);
      }
      level.lower = {{-rest, 1}};
      level.upper = {{-rest, 1}};
      used.erase(std::remove_if(used.begin(), used.end(),
                                [&](const Constraint& c) { return c.kind == ConstraintKind::Ge; }),
                 used.end());
    }
    for (const auto& c : originals) {
      if (innermost_level(c, dims) != static_cast<int>(k)) continue;
      if (std::find(used.begin(), used.end(), c) != used.end()) continue;
      if (std::find(level.guards.begin(), level.guards.end(), c) != level.guards.end()) continue;
      level.guards.push_back(c);
    }
    nest.levels.push_back(std::move(level));
  }
  return nest;
}

std::string LoopNest::str() const {
  std::ostringstream os;
  if (empty) return "empty\n";
  std::string indent;
  if (!guards.empty()) {
    os << "if " << to_string(guards) << ":\n";
    indent += "  ";
  }
  for (const auto& l : levels) {
    if (l.single) {
      os << indent << l.iter << " = " << bound_text(l.lower[0], true) << "\n";
    } else {
      os << indent << "for " << l.iter << " in [" << bound_list(l.lower, true) << ", "
         << bound_list(l.upper, false) << "]";
      if (l.strided) os << " step " << l.modulus.str() << " from " << l.target.str();
      os << ":\n";
      indent += "  ";
    }
    if (!l.guards.empty()) {
      os << indent << "if " << to_string(l.guards) << ":\n";
      indent += "  ";
    }
  }
  os << indent << "body\n";
  return os.str();
}

const char* to_string(Compression c) {
  switch (c) {
    case Compression::None: return "none";
    case Compression::Input: return "input";
    case Compression::InputOutput: return "input+output";
  }
  return "?";
}

Compression parse_compression(const std::string& text) {
  if (text == "none") return Compression::None;
  if (text == "input") return Compression::Input;
  if (text == "input+output" || text == "full") return Compression::InputOutput;
  throw Error(ErrorKind::UnknownIdentifier, "unknown compression level '" + text + "'");
}

namespace {

// First symbol-only upper bound of every coordinate, plus one.
std::optional<std::vector<AffineExpr>> extents_from(const std::vector<std::vector<Constraint>>& alts,
                                                    const std::vector<std::string>& iters,
                                                    const std::vector<std::string>& symbols) {
  std::vector<std::optional<AffineExpr>> best(iters.size());
  for (const auto& alt : alts) {
    Polyhedron p;
    p.dims = iters;
    p.params = symbols;
    p.constraints = alt;
    std::vector<DimBounds> bounds;
    try {
      bounds = dim_bounds(p);
    } catch (const Error&) {
      continue;
    }
    for (std::size_t k = 0; k < iters.size(); ++k) {
      for (const auto& c : bounds[k].upper) {
        Rational a = c.expr.coeff(iters[k]);
        AffineExpr rest = c.expr - AffineExpr::var(iters[k], a);
        bool symbolic = std::none_of(rest.coeffs().begin(), rest.coeffs().end(), [&](const auto& kv) {
          return std::find(iters.begin(), iters.end(), kv.first) != iters.end();
        });
        if (!symbolic) continue;
        AffineExpr extent = rest * (Rational(1) / (-a)) + AffineExpr(Rational(1));
        if (!extent.has_integer_coeffs()) continue;
        if (!best[k] || (best[k]->is_constant() && !extent.is_constant())) best[k] = extent;
      }
    }
  }
  std::vector<AffineExpr> out;
  for (auto& b : best) {
    if (!b) return std::nullopt;
    out.push_back(*b);
  }
  return out;
}

std::vector<std::string> all_symbols(const std::vector<std::vector<Constraint>>& alts) {
  std::set<std::string> s;
  for (const auto& alt : alts) {
    for (const auto& c : alt) {
      auto v = c.vars();
      s.insert(v.begin(), v.end());
    }
  }
  return {s.begin(), s.end()};
}

}  // namespace

std::map<std::string, std::vector<AffineExpr>> resolve_shapes(const Program& p,
                                                              const std::string& rule) {
  std::map<std::string, std::vector<AffineExpr>> out;
  const Rule& r = p.rule(rule);
  std::vector<Summand> compressed;
  bool have_compressed = false;
  for (const auto& s : r.summands) {
    for (std::size_t k = 0; k <= s.inputs.size(); ++k) {
      const Access& a = k == 0 ? s.output : s.inputs[k - 1];
      if (out.count(a.tensor)) continue;
      if (auto it = p.shapes.find(a.tensor); it != p.shapes.end()) {
        out[a.tensor] = it->second;
        continue;
      }
      std::optional<std::vector<AffineExpr>> ext;
      if (auto u = p.unique_sets.find(a.tensor); u != p.unique_sets.end()) {
        std::vector<std::string> syms;
        for (const auto& v : all_symbols(u->second.alternatives)) {
          if (std::find(u->second.iters.begin(), u->second.iters.end(), v) == u->second.iters.end()) {
            syms.push_back(v);
          }
        }
        ext = extents_from(u->second.alternatives, u->second.iters, syms);
      }
      if (!ext) {
        if (!have_compressed) {
          compressed = build_compressed_summands(p, rule);
          have_compressed = true;
        }
        std::vector<std::vector<Constraint>> alts;
        std::vector<std::string> syms;
        for (const auto& cs : compressed) {
          std::map<std::string, std::string> ren;
          const Access* match = nullptr;
          for (std::size_t q = 0; q <= cs.inputs.size() && !match; ++q) {
            const Access& b = q == 0 ? cs.output : cs.inputs[q - 1];
            if (b.tensor == a.tensor) match = &b;
          }
          if (!match) continue;
          // Rename the matching access's indices onto the tensor coordinates.
          for (std::size_t q = 0; q < match->indices.size(); ++q) {
            ren[match->indices[q]] = "$" + std::to_string(q);
          }
          for (const auto& it : cs.iterators) {
            if (!ren.count(it)) ren[it] = it + "#";
          }
          std::vector<Constraint> alt;
          for (const auto& c : cs.constraints) alt.push_back(c.rename(ren));
          // Project away non-coordinate iterators first.
          fm::System sys;
          sys.constraints = alt;
          std::vector<std::string> keep = cs.symbols;
          for (std::size_t q = 0; q < match->indices.size(); ++q) keep.push_back("$" + std::to_string(q));
          fm::project_onto(sys, keep, fm::ModPolicy::Drop);
          alts.push_back(sys.constraints);
          syms = concat(syms, cs.symbols);
        }
        std::vector<std::string> coords;
        for (std::size_t q = 0; q < a.indices.size(); ++q) coords.push_back("$" + std::to_string(q));
        ext = extents_from(alts, coords, syms);
      }
      if (!ext) {
        throw Error(ErrorKind::Unbounded, "cannot infer the shape of tensor '" + a.tensor +
                                              "'; declare it with " + a.tensor + "_S");
      }
      out[a.tensor] = *ext;
    }
  }
  return out;
}

std::vector<std::int64_t> evaluate_shape(const std::vector<AffineExpr>& shape,
                                         const Binding& binding) {
  std::vector<std::int64_t> out;
  for (const auto& e : shape) {
    std::int64_t v = e.evaluate(binding).to_integer();
    if (v < 0) throw Error(ErrorKind::Domain, "negative extent " + e.str());
    out.push_back(v);
  }
  return out;
}

KernelPlan compile_rule(const Program& p, const std::string& rule, Compression compression) {
  KernelPlan plan;
  plan.rule = rule;
  plan.compression = compression;
  const Rule& r = p.rule(rule);
  plan.output = r.head.tensor;
  plan.shapes = resolve_shapes(p, rule);

  std::set<std::string> params;
  std::vector<SummandSpace> spaces;
  for (const auto& s : build_compressed_summands(p, rule)) {
    SummandPlan sp;
    sp.summand = s;
    sp.space = iteration_space(s);
    sp.nest = build_loop_nest(sp.space);
    sp.schedule.order = sp.space.dims;
    const auto& out_idx = s.output.indices;
    sp.parallelizable = !sp.nest.levels.empty() &&
                        std::find(out_idx.begin(), out_idx.end(), sp.nest.levels[0].iter) != out_idx.end();
    params.insert(s.symbols.begin(), s.symbols.end());
    for (const auto& in : s.inputs) {
      if (in.tensor != plan.output &&
          std::find(plan.inputs.begin(), plan.inputs.end(), in.tensor) == plan.inputs.end()) {
        plan.inputs.push_back(in.tensor);
      }
    }
    spaces.push_back({s, sp.space});
    plan.summands.push_back(std::move(sp));
  }
  for (const auto& s : r.summands) {
    for (const auto& in : s.inputs) {
      if (in.tensor != plan.output &&
          std::find(plan.inputs.begin(), plan.inputs.end(), in.tensor) == plan.inputs.end()) {
        plan.inputs.push_back(in.tensor);
      }
    }
  }
  for (const auto& [t, shape] : plan.shapes) {
    for (const auto& e : shape) {
      auto v = e.vars();
      params.insert(v.begin(), v.end());
    }
  }
  plan.params.assign(params.begin(), params.end());

  std::set<std::string> compressed;
  if (compression != Compression::None) compressed.insert(plan.inputs.begin(), plan.inputs.end());
  if (compression == Compression::InputOutput) compressed.insert(plan.output);
  plan.registry = build_registry(spaces, compressed, plan.shapes);
  return plan;
}

std::vector<std::int64_t> KernelPlan::buffer_lengths(const Binding& binding) const {
  std::vector<std::int64_t> out;
  for (const auto& b : registry.buffers) {
    if (b.dense) {
      out.push_back(DenseTensor<int>::element_count(evaluate_shape(b.shape, binding)));
    } else {
      out.push_back(b.index.size.evaluate_or(binding, 0));
    }
  }
  return out;
}

PiecewiseQP access_index(const KernelPlan& plan, std::size_t summand, std::size_t access) {
  const auto& sp = plan.summands.at(summand);
  const Access& a = access == 0 ? sp.summand.output : sp.summand.inputs.at(access - 1);
  const Buffer& b = plan.registry.buffer_for({summand, access});
  PiecewiseQP out;
  out.params = plan.params;
  out.vars = sp.space.dims;
  if (b.dense) {
    QuasiPolynomial r;
    for (std::size_t p = 0; p < a.indices.size(); ++p) {
      QuasiPolynomial term = QuasiPolynomial::var(a.indices[p]);
      for (std::size_t q = p + 1; q < b.shape.size(); ++q) term *= QuasiPolynomial(b.shape[q]);
      r += term;
    }
    out.pieces.push_back({{Conjunction{}}, r});
    return out;
  }
  std::map<std::string, std::string> ren;
  for (std::size_t q = 0; q < b.coords.size(); ++q) ren[b.coords[q]] = a.indices[q];
  for (const auto& piece : b.index.rank.pieces) {
    Piece p;
    p.poly = piece.poly.rename(ren);
    for (const auto& conj : piece.domain) {
      Conjunction c;
      for (const auto& x : conj) c.push_back(x.rename(ren));
      p.domain.push_back(std::move(c));
    }
    out.pieces.push_back(std::move(p));
  }
  return out;
}

std::vector<int> KernelPlan::output_buffers() const { return registry.buffers_of(output); }

std::string KernelPlan::describe() const {
  std::ostringstream os;
  os << "rule " << rule << " compression=" << to_string(compression) << "\n";
  os << "buffers:\n" << registry.dump();
  for (std::size_t s = 0; s < summands.size(); ++s) {
    const auto& sp = summands[s];
    os << "summand " << s << ": " << sp.summand.str() << "\n";
    os << "  parallel=" << (sp.parallelizable ? "outermost" : "no") << "\n";
    for (std::size_t k = 0; k <= sp.summand.inputs.size(); ++k) {
      const Access& a = k == 0 ? sp.summand.output : sp.summand.inputs[k - 1];
      const Buffer& b = registry.buffer_for({s, k});
      os << "  " << a.str() << " -> buffer " << b.id;
      if (b.dense) {
        os << " (dense)\n";
        continue;
      }
      std::map<std::string, std::string> ren;
      for (std::size_t q = 0; q < b.coords.size(); ++q) ren[b.coords[q]] = a.indices[q];
      os << " rank=";
      if (b.index.rank.single_piece()) {
        os << b.index.rank.pieces[0].poly.rename(ren).str() << " size=" << b.index.size.str() << "\n";
        std::istringstream hs(hoist_schedule(b.index.rank.pieces[0].poly.rename(ren), sp.space.dims).str());
        for (std::string line; std::getline(hs, line);) os << "    " << line << "\n";
      } else {
        os << b.index.rank.str() << " size=" << b.index.size.str() << "\n";
      }
    }
    std::istringstream ns(sp.nest.str());
    for (std::string line; std::getline(ns, line);) os << "  " << line << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// C emission

namespace {

std::string c_affine(const AffineExpr& e) {
  std::string out;
  auto term = [&](std::int64_t c, const std::string& v) {
    if (c == 0) return;
    std::int64_t mag = c < 0 ? -c : c;
    if (out.empty()) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    if (v.empty()) {
      out += std::to_string(mag);
    } else {
      if (mag != 1) out += std::to_string(mag) + "*";
      out += v;
    }
  };
  for (const auto& [v, c] : e.coeffs()) term(c.num(), v);
  term(e.constant().num(), "");
  return out.empty() ? "0" : out;
}

std::string c_monomial(const Monomial& m) {
  std::string out;
  for (const auto& [v, e] : m) {
    for (int k = 0; k < e; ++k) out += (out.empty() ? "" : "*") + v;
  }
  return out;
}

// Integer-coefficient polynomial as a C expression.
std::string c_poly(const QuasiPolynomial& p) {
  std::string out;
  std::vector<std::pair<Monomial, Rational>> terms(p.terms().begin(), p.terms().end());
  std::stable_partition(terms.begin(), terms.end(), [](const auto& t) { return !t.first.empty(); });
  for (const auto& [m, c] : terms) {
    std::int64_t v = c.num();
    std::int64_t mag = v < 0 ? -v : v;
    if (out.empty()) {
      if (v < 0) out += "-";
    } else {
      out += v < 0 ? " - " : " + ";
    }
    if (m.empty()) {
      out += std::to_string(mag);
    } else {
      if (mag != 1) out += std::to_string(mag) + "*";
      out += c_monomial(m);
    }
  }
  return out.empty() ? "0" : out;
}

std::string c_constraint(const Constraint& c) {
  switch (c.kind) {
    case ConstraintKind::Ge: return c_affine(c.expr) + " >= 0";
    case ConstraintKind::Eq: return c_affine(c.expr) + " == 0";
    case ConstraintKind::ModEq:
      return "pp_mod(" + c_affine(c.expr) + ", " + c_affine(c.modulus) + ") == " + c_affine(c.residue);
  }
  return "1";
}

std::string c_conjunction(const std::vector<Constraint>& cs) {
  if (cs.empty()) return "1";
  std::string out;
  for (std::size_t k = 0; k < cs.size(); ++k) out += (k ? " && " : "") + std::string("(") + c_constraint(cs[k]) + ")";
  return out;
}

std::string c_bound(const LoopBound& b, bool lower) {
  if (b.div == 1) return c_affine(b.numer);
  return std::string(lower ? "pp_ceild(" : "pp_floord(") + c_affine(b.numer) + ", " +
         std::to_string(b.div) + ")";
}

std::string c_bounds(const std::vector<LoopBound>& bs, bool lower) {
  std::string out = c_bound(bs[0], lower);
  for (std::size_t k = 1; k < bs.size(); ++k) {
    out = std::string(lower ? "pp_max(" : "pp_min(") + out + ", " + c_bound(bs[k], lower) + ")";
  }
  return out;
}

class CWriter {
 public:
  void line(const std::string& s) { os_ << std::string(2 * depth_, ' ') << s << "\n"; }
  void open(const std::string& s) {
    line(s.empty() ? "{" : s + " {");
    ++depth_;
  }
  void close() {
    --depth_;
    line("}");
  }
  void close_all(int to) {
    while (depth_ > to) close();
  }
  int depth() const { return depth_; }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
  int depth_ = 0;
};

}  // namespace

std::map<std::string, std::string> emit_c(const KernelPlan& plan) {
  std::map<std::string, std::string> files;
  for (std::size_t s = 0; s < plan.summands.size(); ++s) {
    const auto& sp = plan.summands[s];
    const std::string fname = plan.rule + "_" + std::to_string(s);
    CWriter w;
    w.line("/* " + sp.summand.str() + " */");
    w.line("#include <stdint.h>");
    w.line("");
    w.line("static inline int64_t pp_floord(int64_t a, int64_t b) { int64_t q = a / b; return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q; }");
    w.line("static inline int64_t pp_ceild(int64_t a, int64_t b) { return -pp_floord(-a, b); }");
    w.line("static inline int64_t pp_max(int64_t a, int64_t b) { return a > b ? a : b; }");
    w.line("static inline int64_t pp_min(int64_t a, int64_t b) { return a < b ? a : b; }");
    w.line("static inline int64_t pp_mod(int64_t a, int64_t m) { int64_t r = a % m; return r < 0 ? r + m : r; }");
    w.line("");

    std::string sig = "void " + fname + "(";
    bool first = true;
    for (const auto& p : plan.params) {
      sig += (first ? "" : ", ") + std::string("int64_t ") + p;
      first = false;
    }
    std::set<int> written;
    for (int id : plan.output_buffers()) written.insert(id);
    for (const auto& b : plan.registry.buffers) {
      sig += (first ? "" : ", ") + std::string(written.count(b.id) ? "double* " : "const double* ") +
             "buf" + std::to_string(b.id);
      first = false;
    }
    sig += ")";
    w.open(sig);

    const auto& nest = sp.nest;
    if (nest.empty) {
      w.close();
      files[fname + ".c"] = w.str();
      continue;
    }
    const auto& dims = sp.space.dims;
    const std::size_t n_acc = sp.summand.inputs.size() + 1;

    // Index polynomials per access, scaled to integers.
    struct AccessCode {
      std::string name;
      int buffer;
      bool single;
      HoistSchedule sched;
      std::int64_t scale = 1;
      PiecewiseQP pieces;
    };
    std::vector<AccessCode> accs;
    for (std::size_t k = 0; k < n_acc; ++k) {
      const Buffer& b = plan.registry.buffer_for({s, k});
      AccessCode ac;
      ac.name = "r" + std::to_string(k);
      ac.buffer = b.id;
      ac.pieces = access_index(plan, s, k);
      ac.single = ac.pieces.single_piece();
      QuasiPolynomial rank = ac.single ? ac.pieces.pieces[0].poly : QuasiPolynomial();
      if (ac.single) {
        ac.sched = hoist_schedule(rank, dims);
        for (const auto& lvl : ac.sched.levels) {
          for (const auto& t : lvl) ac.scale = lcm64(ac.scale, t.coeff.denominator_lcm());
        }
      }
      accs.push_back(std::move(ac));
    }

    // Hoisted symbol-only coefficients.
    int hoisted = 0;
    std::vector<std::vector<std::vector<std::string>>> level_terms(n_acc);
    for (std::size_t a = 0; a < n_acc; ++a) {
      auto& ac = accs[a];
      if (!ac.single) continue;
      level_terms[a].resize(dims.size() + 1);
      for (std::size_t lv = 0; lv <= dims.size(); ++lv) {
        for (const auto& t : ac.sched.levels[lv]) {
          QuasiPolynomial scaled = t.coeff * QuasiPolynomial(Rational(ac.scale));
          std::string coeff;
          if (scaled.is_constant()) {
            coeff = scaled.constant().str();
          } else if (t.iters.empty()) {
            coeff = "(" + c_poly(scaled) + ")";
          } else {
            std::string h = "h" + std::to_string(hoisted++);
            std::string note = factored_str(t.coeff);
            if (ac.scale != 1) note += ", scaled by " + std::to_string(ac.scale);
            w.line("const int64_t " + h + " = " + c_poly(scaled) + "; /* " + note + " */");
            coeff = h;
          }
          std::string mono = c_monomial(t.iters);
          if (mono.empty()) {
            level_terms[a][lv].push_back(coeff);
          } else if (coeff == "1") {
            level_terms[a][lv].push_back(mono);
          } else {
            level_terms[a][lv].push_back(coeff + "*" + mono);
          }
        }
      }
    }
    auto emit_level_sums = [&](std::size_t lv) {
      for (std::size_t a = 0; a < n_acc; ++a) {
        if (!accs[a].single) continue;
        std::string expr = lv == 0 ? "" : accs[a].name + "_" + std::to_string(lv - 1);
        for (const auto& t : level_terms[a][lv]) expr += (expr.empty() ? "" : " + ") + t;
        if (expr.empty()) expr = "0";
        w.line("const int64_t " + accs[a].name + "_" + std::to_string(lv) + " = " + expr + ";");
      }
    };

    if (!nest.guards.empty()) w.open("if (" + c_conjunction(nest.guards) + ")");
    emit_level_sums(0);
    for (std::size_t lv = 0; lv < nest.levels.size(); ++lv) {
      const auto& l = nest.levels[lv];
      if (l.single) {
        w.open("");
        w.line("int64_t " + l.iter + " = " + c_bound(l.lower[0], true) + ";");
      } else {
        std::string lo = c_bounds(l.lower, true);
        std::string hi = c_bounds(l.upper, false);
        std::string step = "1";
        if (l.strided) {
          std::string lo_var = "lo_" + l.iter;
          w.open("");
          w.line("const int64_t " + lo_var + " = " + lo + ";");
          lo = lo_var + " + pp_mod(" + c_affine(l.target) + " - " + lo_var + ", " + c_affine(l.modulus) + ")";
          step = c_affine(l.modulus);
        }
        w.open("for (int64_t " + l.iter + " = " + lo + "; " + l.iter + " <= " + hi + "; " + l.iter +
               (step == "1" ? "++" : " += " + step) + ")");
      }
      if (!l.guards.empty()) w.open("if (" + c_conjunction(l.guards) + ")");
      emit_level_sums(lv + 1);
    }
    // Final indices.
    std::string product;
    for (std::size_t a = 0; a < n_acc; ++a) {
      const auto& ac = accs[a];
      const std::string last = ac.name + "_" + std::to_string(dims.size());
      if (ac.single) {
        w.line("const int64_t " + ac.name + " = " + last + (ac.scale != 1 ? " / " + std::to_string(ac.scale) : "") + ";");
      } else {
        w.line("int64_t " + ac.name + " = -1;");
        bool first_piece = true;
        for (const auto& piece : ac.pieces.pieces) {
          std::int64_t sc = piece.poly.denominator_lcm();
          std::string val = "(" + c_poly(piece.poly * QuasiPolynomial(Rational(sc))) + ")" +
                            (sc != 1 ? " / " + std::to_string(sc) : "");
          for (const auto& conj : piece.domain) {
            w.line(std::string(first_piece ? "if" : "else if") + " (" + c_conjunction(conj) + ") " +
                   ac.name + " = " + val + ";");
            first_piece = false;
          }
        }
      }
      if (a > 0) product += (a > 1 ? " * " : "") + std::string("buf") + std::to_string(ac.buffer) + "[" + ac.name + "]";
    }
    if (product.empty()) product = "1";
    w.line("buf" + std::to_string(accs[0].buffer) + "[" + accs[0].name + "] += " + product + ";");
    w.close_all(1);
    w.close();
    files[fname + ".c"] = w.str();
  }
  return files;
}

}  // namespace polypack
