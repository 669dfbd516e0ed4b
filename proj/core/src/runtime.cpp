#include "polypack/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "polypack/error.hpp"

namespace polypack {

namespace {

// Position of each tensor coordinate among the accessed dims.
std::vector<std::size_t> coordinate_positions(const Polyhedron& accessed,
                                              const std::vector<std::string>& coords) {
  std::vector<std::size_t> pos;
  for (const auto& c : coords) {
    auto it = std::find(accessed.dims.begin(), accessed.dims.end(), c);
    if (it == accessed.dims.end()) {
      throw Error(ErrorKind::UnknownIdentifier, "coordinate '" + c + "' is not an accessed dim");
    }
    pos.push_back(static_cast<std::size_t>(it - accessed.dims.begin()));
  }
  return pos;
}

// Visits (tensor coordinates, rank) for every accessed point.
template <typename Visit>
void for_each_ranked(const IndexFunction& f, const Binding& binding,
                     const std::vector<std::string>& coords, Visit&& visit) {
  SlotMap slots;
  for (const auto& d : f.accessed.dims) slots.add(d);
  for (const auto& p : f.rank.params) slots.add(p);
  for (const auto& p : f.accessed.params) slots.add(p);
  std::vector<std::int64_t> vals(slots.size(), 0);
  for (std::size_t k = f.accessed.dims.size(); k < slots.size(); ++k) {
    auto it = binding.find(slots.names()[k]);
    if (it == binding.end()) {
      throw Error(ErrorKind::Binding, "no value bound for symbol '" + slots.names()[k] + "'");
    }
    vals[k] = it->second;
  }
  CompiledPiecewise rank(f.rank, slots);
  const auto pos = coordinate_positions(f.accessed, coords);
  std::vector<std::int64_t> coord(coords.size());
  for (const auto& point : enumerate(f.accessed, binding)) {
    std::copy(point.begin(), point.end(), vals.begin());
    for (std::size_t q = 0; q < pos.size(); ++q) coord[q] = point[pos[q]];
    visit(coord, rank.eval(vals));
  }
}

bool in_any(const std::vector<Polyhedron>& regions, const std::vector<std::vector<std::string>>& coords,
            const std::vector<std::int64_t>& x, const Binding& binding) {
  for (std::size_t r = 0; r < regions.size(); ++r) {
    Binding b = binding;
    for (std::size_t q = 0; q < x.size(); ++q) b[coords[r][q]] = x[q];
    if (regions[r].contains(b)) return true;
  }
  return false;
}

}  // namespace

template <typename T>
CompressedBuffer<T> pack(const DenseTensor<T>& t, const IndexFunction& f, const Binding& binding,
                         const std::vector<std::string>& coords, std::vector<int>* write_counts) {
  CompressedBuffer<T> c;
  c.length = f.size.evaluate_or(binding, 0);
  c.data.assign(static_cast<std::size_t>(c.length), T{});
  if (write_counts) write_counts->assign(static_cast<std::size_t>(c.length), 0);
  for_each_ranked(f, binding, coords, [&](const std::vector<std::int64_t>& x, std::int64_t r) {
    if (r < 0 || r >= c.length) {
      throw Error(ErrorKind::IndexOutOfRange, "rank " + std::to_string(r) + " outside buffer of length " +
                                                  std::to_string(c.length));
    }
    c.data[static_cast<std::size_t>(r)] = t.at(x);
    if (write_counts) ++(*write_counts)[static_cast<std::size_t>(r)];
  });
  return c;
}

template <typename T>
void unpack_into(DenseTensor<T>& out, const CompressedBuffer<T>& c, const IndexFunction& f,
                 const Binding& binding, const std::vector<std::string>& coords) {
  for_each_ranked(f, binding, coords, [&](const std::vector<std::int64_t>& x, std::int64_t r) {
    if (r < 0 || r >= static_cast<std::int64_t>(c.data.size())) {
      throw Error(ErrorKind::IndexOutOfRange, "rank " + std::to_string(r) + " outside buffer of length " +
                                                  std::to_string(c.data.size()));
    }
    out.at(x) = c.data[static_cast<std::size_t>(r)];
  });
}

template <typename T>
void apply_redundancy(DenseTensor<T>& t, const RedundancyMap& redmap, const Binding& binding,
                      const std::vector<Polyhedron>& unique,
                      const std::vector<std::vector<std::string>>& coords) {
  if (redmap.iters.size() != t.shape.size()) {
    throw Error(ErrorKind::Arity, "redundancy map arity does not match tensor '" + redmap.tensor + "'");
  }
  if (t.data.empty()) return;
  std::vector<std::int64_t> x(t.shape.size(), 0), y(t.shape.size());
  for (;;) {
    Binding b = binding;
    for (std::size_t q = 0; q < x.size(); ++q) b[redmap.iters[q]] = x[q];
    bool redundant = std::all_of(redmap.domain.begin(), redmap.domain.end(),
                                 [&](const Constraint& c) { return c.holds(b); });
    if (redundant && !in_any(unique, coords, x, binding)) {
      for (std::size_t q = 0; q < y.size(); ++q) y[q] = redmap.images[q].evaluate(b).to_integer();
      if (!in_any(unique, coords, y, binding)) {
        throw Error(ErrorKind::Domain, "redundancy map image lies outside the accessed domain of '" +
                                           redmap.tensor + "'");
      }
      t.at(x) = t.at(y);
    }
    std::size_t d = x.size();
    bool done = true;
    while (d-- > 0) {
      if (++x[d] < t.shape[d]) {
        done = false;
        break;
      }
      x[d] = 0;
    }
    if (done) break;
  }
}

template <typename T>
DenseTensor<T> unpack(const CompressedBuffer<T>& c, const IndexFunction& f, const RedundancyMap* redmap,
                      const Binding& binding, const std::vector<std::int64_t>& shape,
                      const std::vector<std::string>& coords) {
  DenseTensor<T> out(shape);
  unpack_into(out, c, f, binding, coords);
  if (redmap) apply_redundancy(out, *redmap, binding, {f.accessed}, {coords});
  return out;
}

Rational FootprintReport::rate() const {
  return Rational(dense_total) / Rational(compressed_total == 0 ? 1 : compressed_total);
}

const TensorFootprint& FootprintReport::tensor(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.tensor == name) return t;
  }
  throw Error(ErrorKind::UnknownIdentifier, "no footprint entry for '" + name + "'");
}

std::string FootprintReport::str() const {
  std::ostringstream os;
  auto line = [&](const std::string& name, std::int64_t d, std::int64_t c, const Rational& r) {
    os << name << " dense=" << d << " compressed=" << c << " rate=" << r.str() << " ("
       << r.to_double() << ")\n";
  };
  for (const auto& t : tensors) line(t.tensor + (t.output ? " [out]" : ""), t.dense, t.compressed, t.rate());
  line("total", dense_total, compressed_total, rate());
  return os.str();
}

FootprintReport footprint_report(const KernelPlan& plan, const Binding& binding) {
  FootprintReport rep;
  const auto lengths = plan.buffer_lengths(binding);
  std::vector<std::string> tensors{plan.output};
  tensors.insert(tensors.end(), plan.inputs.begin(), plan.inputs.end());
  for (const auto& name : tensors) {
    TensorFootprint tf;
    tf.tensor = name;
    tf.output = name == plan.output;
    tf.dense = DenseTensor<int>::element_count(evaluate_shape(plan.shapes.at(name), binding));
    for (int id : plan.registry.buffers_of(name)) tf.compressed += lengths[static_cast<std::size_t>(id)];
    rep.dense_total += tf.dense;
    rep.compressed_total += tf.compressed;
    rep.tensors.push_back(tf);
  }
  return rep;
}

template <typename T>
DenseTensor<T> read_tensor(std::istream& in) {
  std::string line;
  while (std::getline(in, line) && line.find_first_not_of(" \t\r") == std::string::npos) {
  }
  const std::string key = "shape:";
  if (line.rfind(key, 0) != 0) throw Error(ErrorKind::Io, "tensor file must start with 'shape:'");
  std::istringstream hs(line.substr(key.size()));
  std::vector<std::int64_t> shape;
  for (std::int64_t d; hs >> d;) {
    if (d < 0) throw Error(ErrorKind::Io, "negative extent in tensor header");
    shape.push_back(d);
  }
  DenseTensor<T> t(shape);
  for (auto& v : t.data) {
    if (!(in >> v)) throw Error(ErrorKind::Io, "tensor file has fewer values than its shape");
  }
  T extra;
  if (in >> extra) throw Error(ErrorKind::Io, "tensor file has more values than its shape");
  return t;
}

template <typename T>
void write_tensor(std::ostream& out, const DenseTensor<T>& t) {
  out << "shape:";
  for (auto d : t.shape) out << " " << d;
  out << "\n";
  if (std::is_floating_point_v<T>) out.precision(17);
  const std::int64_t row = t.shape.empty() ? 1 : std::max<std::int64_t>(t.shape.back(), 1);
  for (std::size_t k = 0; k < t.data.size(); ++k) {
    out << t.data[k] << ((static_cast<std::int64_t>(k) + 1) % row == 0 ? "\n" : " ");
  }
}

template <typename T>
DenseTensor<T> load_tensor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open tensor file '" + path + "'");
  return read_tensor<T>(in);
}

template <typename T>
DenseTensor<T> random_tensor(const std::vector<std::int64_t>& shape, std::uint64_t seed) {
  DenseTensor<T> t(shape);
  std::mt19937_64 rng(seed);
  if constexpr (std::is_floating_point_v<T>) {
    std::uniform_real_distribution<T> dist(-10, 10);
    for (auto& v : t.data) v = dist(rng);
  } else {
    std::uniform_int_distribution<T> dist(-9, 9);
    for (auto& v : t.data) v = dist(rng);
  }
  return t;
}

template <typename T>
std::map<std::string, DenseTensor<T>> random_inputs(const KernelPlan& plan, const Binding& binding,
                                                    std::uint64_t seed) {
  std::map<std::string, DenseTensor<T>> out;
  std::uint64_t k = 0;
  for (const auto& name : plan.inputs) {
    out[name] = random_tensor<T>(evaluate_shape(plan.shapes.at(name), binding), seed * 1000003ULL + k++);
  }
  return out;
}

template <typename T>
std::vector<std::vector<T>> prepare_buffers(const KernelPlan& plan,
                                            const std::map<std::string, DenseTensor<T>>& inputs,
                                            const Binding& binding) {
  const auto lengths = plan.buffer_lengths(binding);
  std::vector<std::vector<T>> bufs(lengths.size());
  for (const auto& b : plan.registry.buffers) {
    auto& buf = bufs[static_cast<std::size_t>(b.id)];
    if (b.tensor == plan.output) {
      buf.assign(static_cast<std::size_t>(lengths[static_cast<std::size_t>(b.id)]), T{});
      continue;
    }
    auto it = inputs.find(b.tensor);
    if (it == inputs.end()) throw Error(ErrorKind::UnknownIdentifier, "no input tensor '" + b.tensor + "'");
    if (b.dense) {
      if (it->second.shape != evaluate_shape(b.shape, binding)) {
        throw Error(ErrorKind::Arity, "input '" + b.tensor + "' has the wrong shape");
      }
      buf = it->second.data;
    } else {
      buf = pack(it->second, b.index, binding, b.coords).data;
    }
  }
  return bufs;
}

template <typename T>
DenseTensor<T> gather_output(const KernelPlan& plan, const Program& program,
                             const std::vector<std::vector<T>>& buffers, const Binding& binding) {
  DenseTensor<T> out(evaluate_shape(plan.shapes.at(plan.output), binding));
  std::vector<Polyhedron> regions;
  std::vector<std::vector<std::string>> coords;
  for (int id : plan.output_buffers()) {
    const Buffer& b = plan.registry.buffers[static_cast<std::size_t>(id)];
    const auto& data = buffers[static_cast<std::size_t>(id)];
    if (b.dense) {
      out.data = data;
      continue;
    }
    CompressedBuffer<T> c{id, static_cast<std::int64_t>(data.size()), data};
    unpack_into(out, c, b.index, binding, b.coords);
    regions.push_back(b.index.accessed);
    coords.push_back(b.coords);
  }
  auto rm = program.redundancy_maps.find(plan.output);
  if (rm != program.redundancy_maps.end() && !regions.empty()) {
    apply_redundancy(out, rm->second, binding, regions, coords);
  }
  return out;
}

template <typename T>
DenseTensor<T> run_compressed(const KernelPlan& plan, const Program& program,
                              const std::map<std::string, DenseTensor<T>>& inputs,
                              const Binding& binding, const ExecOptions& options, ExecStats* stats) {
  auto bufs = prepare_buffers(plan, inputs, binding);
  ExecStats s = execute(plan, bufs, binding, options);
  if (stats) *stats = s;
  return gather_output(plan, program, bufs, binding);
}

template <typename T>
double max_relative_error(const DenseTensor<T>& got, const DenseTensor<T>& want) {
  if (got.shape != want.shape) throw Error(ErrorKind::Arity, "compared tensors differ in shape");
  double diff = 0, scale = 1;
  for (std::size_t k = 0; k < got.data.size(); ++k) {
    diff = std::max(diff, std::abs(static_cast<double>(got.data[k]) - static_cast<double>(want.data[k])));
    scale = std::max(scale, std::abs(static_cast<double>(want.data[k])));
  }
  return diff / scale;
}

#define POLYPACK_INSTANTIATE(T)                                                                       \
  template CompressedBuffer<T> pack(const DenseTensor<T>&, const IndexFunction&, const Binding&,       \
                                    const std::vector<std::string>&, std::vector<int>*);               \
  template void unpack_into(DenseTensor<T>&, const CompressedBuffer<T>&, const IndexFunction&,         \
                            const Binding&, const std::vector<std::string>&);                          \
  template void apply_redundancy(DenseTensor<T>&, const RedundancyMap&, const Binding&,                \
                                 const std::vector<Polyhedron>&,                                       \
                                 const std::vector<std::vector<std::string>>&);                        \
  template DenseTensor<T> unpack(const CompressedBuffer<T>&, const IndexFunction&,                     \
                                 const RedundancyMap*, const Binding&, const std::vector<std::int64_t>&, \
                                 const std::vector<std::string>&);                                     \
  template DenseTensor<T> read_tensor<T>(std::istream&);                                               \
  template void write_tensor(std::ostream&, const DenseTensor<T>&);                                    \
  template DenseTensor<T> load_tensor<T>(const std::string&);                                          \
  template DenseTensor<T> random_tensor<T>(const std::vector<std::int64_t>&, std::uint64_t);           \
  template std::map<std::string, DenseTensor<T>> random_inputs<T>(const KernelPlan&, const Binding&,   \
                                                                  std::uint64_t);                      \
  template std::vector<std::vector<T>> prepare_buffers(                                                \
      const KernelPlan&, const std::map<std::string, DenseTensor<T>>&, const Binding&);                \
  template DenseTensor<T> gather_output(const KernelPlan&, const Program&,                             \
                                        const std::vector<std::vector<T>>&, const Binding&);           \
  template DenseTensor<T> run_compressed(const KernelPlan&, const Program&,                            \
                                         const std::map<std::string, DenseTensor<T>>&,                 \
                                         const Binding&, const ExecOptions&, ExecStats*);              \
  template double max_relative_error(const DenseTensor<T>&, const DenseTensor<T>&);

POLYPACK_INSTANTIATE(double)
POLYPACK_INSTANTIATE(std::int64_t)

#undef POLYPACK_INSTANTIATE

}  // namespace polypack
