#include <algorithm>
#include <exception>
#include <functional>
#include <thread>

#include "polypack/codegen.hpp"
#include "polypack/error.hpp"
#include "polypack/fourier_motzkin.hpp"

namespace polypack {

namespace {

// Slots: loop iterators in level order, then symbols.
SlotMap nest_slots(const LoopNest& nest) {
  SlotMap slots;
  for (const auto& l : nest.levels) slots.add(l.iter);
  for (const auto& p : nest.params) slots.add(p);
  return slots;
}

std::vector<std::int64_t> initial_values(const SlotMap& slots, std::size_t first_param,
                                         const Binding& binding) {
  std::vector<std::int64_t> vals(slots.size(), 0);
  for (std::size_t k = first_param; k < slots.size(); ++k) {
    auto it = binding.find(slots.names()[k]);
    if (it == binding.end()) {
      throw Error(ErrorKind::Binding, "no value bound for symbol '" + slots.names()[k] + "'");
    }
    vals[k] = it->second;
  }
  return vals;
}

class CompiledNest {
 public:
  CompiledNest(const LoopNest& nest, const SlotMap& slots) : empty_(nest.empty) {
    for (const auto& c : nest.guards) top_.push_back(CompiledConstraint::compile(c, slots));
    for (const auto& l : nest.levels) {
      Level lv;
      for (const auto& b : l.lower) lv.lower.push_back({LinearForm::compile(b.numer, slots), b.div});
      for (const auto& b : l.upper) lv.upper.push_back({LinearForm::compile(b.numer, slots), b.div});
      lv.strided = l.strided;
      if (l.strided) {
        lv.modulus = LinearForm::compile(l.modulus, slots);
        lv.target = LinearForm::compile(l.target, slots);
      }
      for (const auto& c : l.guards) lv.guards.push_back(CompiledConstraint::compile(c, slots));
      levels_.push_back(std::move(lv));
    }
  }

  std::size_t depth() const { return levels_.size(); }

  bool top_ok(std::span<const std::int64_t> vals) const {
    if (empty_) return false;
    return std::all_of(top_.begin(), top_.end(), [&](const auto& c) { return c.holds(vals); });
  }

  // Iteration range of level k; false when empty.
  bool range(std::size_t k, std::span<const std::int64_t> vals, std::int64_t& lo, std::int64_t& hi,
             std::int64_t& step) const {
    const Level& l = levels_[k];
    lo = ceil_div(l.lower[0].numer.eval(vals), l.lower[0].div);
    for (std::size_t q = 1; q < l.lower.size(); ++q) {
      lo = std::max(lo, ceil_div(l.lower[q].numer.eval(vals), l.lower[q].div));
    }
    hi = floor_div(l.upper[0].numer.eval(vals), l.upper[0].div);
    for (std::size_t q = 1; q < l.upper.size(); ++q) {
      hi = std::min(hi, floor_div(l.upper[q].numer.eval(vals), l.upper[q].div));
    }
    step = 1;
    if (l.strided) {
      step = l.modulus.eval(vals);
      if (step <= 0) return false;
      lo += pos_mod(l.target.eval(vals) - lo, step);
    }
    return lo <= hi;
  }

  bool guards_ok(std::size_t k, std::span<const std::int64_t> vals) const {
    const auto& g = levels_[k].guards;
    return std::all_of(g.begin(), g.end(), [&](const auto& c) { return c.holds(vals); });
  }

 private:
  struct Bound {
    LinearForm numer;
    std::int64_t div;
  };
  struct Level {
    std::vector<Bound> lower, upper;
    bool strided = false;
    LinearForm modulus, target;
    std::vector<CompiledConstraint> guards;
  };
  bool empty_;
  std::vector<CompiledConstraint> top_;
  std::vector<Level> levels_;
};

void walk(const CompiledNest& nest, std::size_t k, std::vector<std::int64_t>& vals,
          const std::function<void(std::size_t)>& enter) {
  std::int64_t lo, hi, step;
  if (!nest.range(k, vals, lo, hi, step)) return;
  for (std::int64_t x = lo; x <= hi; x += step) {
    vals[k] = x;
    if (!nest.guards_ok(k, vals)) continue;
    enter(k + 1);
    if (k + 1 < nest.depth()) walk(nest, k + 1, vals, enter);
  }
}

// Numeric index plan of one access at a fixed binding.
struct RtTerm {
  std::int64_t coeff;
  std::vector<int> slots;  // one entry per unit of exponent
};

struct RtAccess {
  int buffer = 0;
  std::int64_t length = 0;
  bool hoisted = false;
  std::vector<std::vector<RtTerm>> levels;
  std::size_t fold = 0;
  std::int64_t scale = 1;
  CompiledPiecewise pieces;
  CompiledPolynomial direct;
  bool corrupt = false;
};

std::vector<Constraint> substitute_all(std::vector<Constraint> cs, const Binding& values) {
  for (auto& c : cs) {
    for (const auto& [name, v] : values) c = c.substitute(name, AffineExpr(Rational(v)));
  }
  return cs;
}

RtAccess bind_access(const PiecewiseQP& index, const Polyhedron& space, const SlotMap& slots,
                     const Binding& params) {
  RtAccess acc;
  std::vector<const Piece*> live;
  const auto space_cs = substitute_all(space.constraints, params);
  for (const auto& piece : index.pieces) {
    bool alive = false;
    for (const auto& conj : piece.domain) {
      auto cs = substitute_all(conj, params);
      cs.insert(cs.end(), space_cs.begin(), space_cs.end());
      if (!fm::rationally_empty(cs, {})) alive = true;
    }
    if (alive) live.push_back(&piece);
  }
  acc.pieces = CompiledPiecewise(index, slots);
  if (live.size() != 1) return acc;

  acc.hoisted = true;
  acc.direct = CompiledPolynomial(live[0]->poly, slots);
  QuasiPolynomial poly = live[0]->poly;
  for (const auto& [name, v] : params) poly = poly.substitute(name, QuasiPolynomial(Rational(v)));
  HoistSchedule sched = hoist_schedule(poly, space.dims);
  for (std::size_t lv = 0; lv < sched.levels.size(); ++lv) {
    for (const auto& t : sched.levels[lv]) {
      Rational c = t.coeff.constant();
      acc.scale = lcm64(acc.scale, c.den());
      if (!c.is_integer()) acc.fold = lv;
    }
  }
  acc.levels.resize(sched.levels.size());
  for (std::size_t lv = 0; lv < sched.levels.size(); ++lv) {
    for (const auto& t : sched.levels[lv]) {
      Rational c = t.coeff.constant();
      if (lv <= acc.fold) c *= Rational(acc.scale);
      RtTerm term{c.to_integer(), {}};
      for (const auto& [v, e] : t.iters) {
        for (int q = 0; q < e; ++q) term.slots.push_back(slots.at(v));
      }
      acc.levels[lv].push_back(std::move(term));
    }
  }
  return acc;
}

template <typename T>
class Runner {
 public:
  Runner(const CompiledNest& nest, std::vector<RtAccess>& accs, std::vector<T*> bufs,
         std::vector<std::int64_t> vals, bool check)
      : nest_(nest), accs_(accs), bufs_(std::move(bufs)), vals_(std::move(vals)), check_(check) {
    width_ = nest.depth() + 1;
    acc_.assign(accs_.size() * width_, 0);
  }

  void run_all() {
    if (!nest_.top_ok(vals_)) return;
    enter(0);
    if (nest_.depth() == 0) {
      body();
      return;
    }
    std::int64_t lo, hi, step;
    if (nest_.range(0, vals_, lo, hi, step)) loop(0, lo, hi, step);
  }

  // Runs the outermost level over [lo, hi] only (parallel chunks).
  void run_outer(std::int64_t lo, std::int64_t hi, std::int64_t step) {
    enter(0);
    loop(0, lo, hi, step);
  }

  std::uint64_t iterations = 0;
  std::uint64_t checks = 0;

 private:
  void loop(std::size_t k, std::int64_t lo, std::int64_t hi, std::int64_t step) {
    for (std::int64_t x = lo; x <= hi; x += step) {
      vals_[k] = x;
      if (!nest_.guards_ok(k, vals_)) continue;
      enter(k + 1);
      if (k + 1 == nest_.depth()) {
        body();
      } else {
        std::int64_t l2, h2, s2;
        if (nest_.range(k + 1, vals_, l2, h2, s2)) loop(k + 1, l2, h2, s2);
      }
    }
  }

  void enter(std::size_t lv) {
    for (std::size_t a = 0; a < accs_.size(); ++a) {
      const RtAccess& ra = accs_[a];
      if (!ra.hoisted) continue;
      std::int64_t v = lv == 0 ? 0 : acc_[a * width_ + lv - 1];
      for (const auto& t : ra.levels[lv]) {
        std::int64_t m = t.coeff;
        for (int s : t.slots) m *= vals_[static_cast<std::size_t>(s)];
        v += m;
      }
      if (lv == ra.fold && ra.scale != 1) {
        if (v % ra.scale != 0) throw Error(ErrorKind::NonIntegral, "hoisted index is not integral");
        v /= ra.scale;
      }
      acc_[a * width_ + lv] = v;
    }
  }

  std::int64_t index_of(std::size_t a) {
    const RtAccess& ra = accs_[a];
    std::int64_t idx;
    if (ra.hoisted) {
      idx = acc_[a * width_ + width_ - 1];
      if (check_) {
        ++checks;
        std::int64_t d = ra.direct.eval(vals_);
        if (d != idx) {
          throw Error(ErrorKind::Domain, "hoisted index " + std::to_string(idx) +
                                             " differs from direct evaluation " + std::to_string(d));
        }
      }
    } else {
      idx = ra.pieces.eval(vals_);
    }
    if (ra.corrupt && ra.length > 0) idx = (idx + 1) % ra.length;
    if (idx < 0 || idx >= ra.length) {
      throw Error(ErrorKind::IndexOutOfRange, "index " + std::to_string(idx) + " outside buffer " +
                                                  std::to_string(ra.buffer) + " of length " +
                                                  std::to_string(ra.length));
    }
    return idx;
  }

  void body() {
    ++iterations;
    std::int64_t out = index_of(0);
    T prod = T(1);
    for (std::size_t a = 1; a < accs_.size(); ++a) prod *= bufs_[a][index_of(a)];
    bufs_[0][out] += prod;
  }

  const CompiledNest& nest_;
  std::vector<RtAccess>& accs_;
  std::vector<T*> bufs_;
  std::vector<std::int64_t> vals_;
  bool check_;
  std::size_t width_;
  std::vector<std::int64_t> acc_;
};

}  // namespace

std::vector<std::vector<std::int64_t>> LoopNest::scan(const Binding& binding) const {
  SlotMap slots = nest_slots(*this);
  CompiledNest nest(*this, slots);
  auto vals = initial_values(slots, levels.size(), binding);
  std::vector<std::vector<std::int64_t>> out;
  if (!nest.top_ok(vals)) return out;
  if (levels.empty()) {
    out.emplace_back();
    return out;
  }
  walk(nest, 0, vals, [&](std::size_t lv) {
    if (lv == levels.size()) out.emplace_back(vals.begin(), vals.begin() + static_cast<long>(lv));
  });
  return out;
}

template <typename T>
ExecStats execute(const KernelPlan& plan, std::vector<std::vector<T>>& buffers,
                  const Binding& binding, const ExecOptions& options) {
  const auto lengths = plan.buffer_lengths(binding);
  if (buffers.size() != lengths.size()) {
    throw Error(ErrorKind::Domain, "expected " + std::to_string(lengths.size()) + " buffers");
  }
  for (std::size_t b = 0; b < lengths.size(); ++b) {
    if (static_cast<std::int64_t>(buffers[b].size()) != lengths[b]) {
      throw Error(ErrorKind::Domain, "buffer " + std::to_string(b) + " has length " +
                                         std::to_string(buffers[b].size()) + ", expected " +
                                         std::to_string(lengths[b]));
    }
  }
  for (int id : plan.output_buffers()) std::fill(buffers[id].begin(), buffers[id].end(), T{});

  Binding params;
  for (const auto& p : plan.params) {
    auto it = binding.find(p);
    if (it == binding.end()) throw Error(ErrorKind::Binding, "no value bound for symbol '" + p + "'");
    params[p] = it->second;
  }

  ExecStats stats;
  for (std::size_t s = 0; s < plan.summands.size(); ++s) {
    const auto& sp = plan.summands[s];
    SlotMap slots = nest_slots(sp.nest);
    for (const auto& p : plan.params) slots.add(p);
    CompiledNest nest(sp.nest, slots);
    auto vals = initial_values(slots, sp.nest.levels.size(), binding);

    std::vector<RtAccess> accs;
    std::vector<T*> bufs;
    bool corrupted = false;
    for (std::size_t k = 0; k <= sp.summand.inputs.size(); ++k) {
      const Buffer& b = plan.registry.buffer_for({s, k});
      RtAccess ra = bind_access(access_index(plan, s, k), sp.space, slots, params);
      ra.buffer = b.id;
      ra.length = lengths[static_cast<std::size_t>(b.id)];
      if (k > 0 && !corrupted && options.corrupt_tensor && *options.corrupt_tensor == b.tensor) {
        ra.corrupt = corrupted = true;
      }
      accs.push_back(std::move(ra));
      bufs.push_back(buffers[static_cast<std::size_t>(b.id)].data());
    }

    std::int64_t lo = 0, hi = -1, step = 1;
    const bool parallel = options.workers > 1 && sp.parallelizable && nest.depth() > 0 &&
                          nest.top_ok(vals) && nest.range(0, vals, lo, hi, step);
    if (!parallel) {
      Runner<T> r(nest, accs, bufs, vals, options.check_hoisting);
      r.run_all();
      stats.iterations += r.iterations;
      stats.hoist_checks += r.checks;
      continue;
    }
    const std::int64_t count = (hi - lo) / step + 1;
    const std::int64_t workers = std::min<std::int64_t>(options.workers, count);
    std::vector<Runner<T>> runners;
    runners.reserve(static_cast<std::size_t>(workers));
    for (std::int64_t w = 0; w < workers; ++w) runners.emplace_back(nest, accs, bufs, vals, options.check_hoisting);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> threads;
    for (std::int64_t w = 0; w < workers; ++w) {
      const std::int64_t first = count * w / workers;
      const std::int64_t last = count * (w + 1) / workers - 1;
      threads.emplace_back([&, w, first, last] {
        try {
          runners[static_cast<std::size_t>(w)].run_outer(lo + first * step, lo + last * step, step);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (const auto& r : runners) {
      stats.iterations += r.iterations;
      stats.hoist_checks += r.checks;
    }
  }
  return stats;
}

template <typename T>
DenseTensor<T> reference_execute(const Program& p, const std::string& rule,
                                 const std::map<std::string, DenseTensor<T>>& inputs,
                                 const Binding& binding) {
  const Rule& r = p.rule(rule);
  const auto shapes = resolve_shapes(p, rule);
  DenseTensor<T> out(evaluate_shape(shapes.at(r.head.tensor), binding));

  for (const auto& s : r.summands) {
    SlotMap slots;
    for (const auto& it : s.iterators) slots.add(it);
    const std::size_t n_it = s.iterators.size();
    Binding needed;
    auto bind_vars = [&](const std::set<std::string>& vars) {
      for (const auto& v : vars) {
        if (slots.contains(v)) continue;
        auto it = binding.find(v);
        if (it == binding.end()) throw Error(ErrorKind::Binding, "no value bound for symbol '" + v + "'");
        slots.add(v);
        needed[v] = it->second;
      }
    };
    for (const auto& c : s.constraints) bind_vars(c.vars());

    // Per access: tensor storage, strides and unique-set alternatives.
    struct Acc {
      const DenseTensor<T>* tensor = nullptr;
      std::vector<int> slot;
      std::vector<std::int64_t> stride;
      std::vector<std::vector<CompiledConstraint>> alternatives;
    };
    std::vector<Acc> accs;
    std::vector<std::int64_t> extent(n_it, -1);
    for (std::size_t k = 0; k <= s.inputs.size(); ++k) {
      const Access& a = k == 0 ? s.output : s.inputs[k - 1];
      Acc acc;
      std::vector<std::int64_t> shape;
      if (k == 0) {
        shape = out.shape;
      } else {
        auto it = inputs.find(a.tensor);
        if (it == inputs.end()) throw Error(ErrorKind::UnknownIdentifier, "no input tensor '" + a.tensor + "'");
        acc.tensor = &it->second;
        shape = it->second.shape;
      }
      if (shape.size() != a.indices.size()) {
        throw Error(ErrorKind::Arity, "tensor '" + a.tensor + "' rank does not match access " + a.str());
      }
      std::int64_t stride = 1;
      acc.stride.assign(shape.size(), 0);
      for (std::size_t q = shape.size(); q-- > 0;) {
        acc.stride[q] = stride;
        stride *= shape[q];
      }
      for (std::size_t q = 0; q < a.indices.size(); ++q) {
        int sl = slots.at(a.indices[q]);
        acc.slot.push_back(sl);
        auto& e = extent[static_cast<std::size_t>(sl)];
        e = e < 0 ? shape[q] : std::min(e, shape[q]);
      }
      if (auto u = p.unique_sets.find(a.tensor); u != p.unique_sets.end()) {
        std::map<std::string, std::string> ren;
        for (std::size_t q = 0; q < u->second.iters.size(); ++q) ren[u->second.iters[q]] = a.indices[q];
        for (const auto& alt : u->second.alternatives) {
          std::vector<Constraint> cs;
          for (const auto& c : alt) {
            cs.push_back(c.rename(ren));
            bind_vars(cs.back().vars());
          }
          acc.alternatives.emplace_back();
          for (const auto& c : cs) acc.alternatives.back().push_back(CompiledConstraint::compile(c, slots));
        }
      }
      accs.push_back(std::move(acc));
    }
    std::vector<CompiledConstraint> checks;
    for (const auto& c : s.constraints) checks.push_back(CompiledConstraint::compile(c, slots));

    std::vector<std::int64_t> vals(slots.size(), 0);
    for (const auto& [v, x] : needed) vals[static_cast<std::size_t>(slots.at(v))] = x;
    bool any = true;
    for (auto e : extent) any = any && e > 0;
    if (!any) continue;
    for (;;) {
      bool ok = std::all_of(checks.begin(), checks.end(), [&](const auto& c) { return c.holds(vals); });
      for (std::size_t k = 0; ok && k < accs.size(); ++k) {
        const auto& alts = accs[k].alternatives;
        if (alts.empty() && p.unique_sets.count(k == 0 ? s.output.tensor : s.inputs[k - 1].tensor)) {
          ok = false;
        }
        if (!alts.empty()) {
          ok = std::any_of(alts.begin(), alts.end(), [&](const auto& alt) {
            return std::all_of(alt.begin(), alt.end(), [&](const auto& c) { return c.holds(vals); });
          });
        }
      }
      if (ok) {
        auto offset = [&](const Acc& a) {
          std::int64_t off = 0;
          for (std::size_t q = 0; q < a.slot.size(); ++q) off += a.stride[q] * vals[static_cast<std::size_t>(a.slot[q])];
          return off;
        };
        T prod = T(1);
        for (std::size_t k = 1; k < accs.size(); ++k) prod *= accs[k].tensor->data[static_cast<std::size_t>(offset(accs[k]))];
        out.data[static_cast<std::size_t>(offset(accs[0]))] += prod;
      }
      std::size_t d = n_it;
      bool done = true;
      while (d-- > 0) {
        if (++vals[d] < extent[d]) {
          done = false;
          break;
        }
        vals[d] = 0;
      }
      if (done) break;
    }
  }
  return out;
}

template ExecStats execute<double>(const KernelPlan&, std::vector<std::vector<double>>&, const Binding&,
                                   const ExecOptions&);
template ExecStats execute<std::int64_t>(const KernelPlan&, std::vector<std::vector<std::int64_t>>&,
                                         const Binding&, const ExecOptions&);
template DenseTensor<double> reference_execute<double>(const Program&, const std::string&,
                                                       const std::map<std::string, DenseTensor<double>>&,
                                                       const Binding&);
template DenseTensor<std::int64_t> reference_execute<std::int64_t>(
    const Program&, const std::string&, const std::map<std::string, DenseTensor<std::int64_t>>&,
    const Binding&);

}  // namespace polypack
