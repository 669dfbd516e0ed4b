#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "polypack/codegen.hpp"
#include "polypack/indexing.hpp"
#include "polypack/tensor.hpp"

namespace polypack {

template <typename T>
struct CompressedBuffer {
  int id = 0;
  std::int64_t length = 0;
  std::vector<T> data;
};

/// Gathers the accessed coordinates of `t` into rank order. `write_counts`,
/// when given, receives the number of writes per slot.
template <typename T>
CompressedBuffer<T> pack(const DenseTensor<T>& t, const IndexFunction& f, const Binding& binding,
                         const std::vector<std::string>& coords,
                         std::vector<int>* write_counts = nullptr);

/// Scatters `c` back into `out` (which keeps its other values).
template <typename T>
void unpack_into(DenseTensor<T>& out, const CompressedBuffer<T>& c, const IndexFunction& f,
                 const Binding& binding, const std::vector<std::string>& coords);

/// Copies every redundant coordinate from its unique representative. Throws
/// ErrorKind::Domain when a representative is outside `unique`.
template <typename T>
void apply_redundancy(DenseTensor<T>& t, const RedundancyMap& redmap, const Binding& binding,
                      const std::vector<Polyhedron>& unique, const std::vector<std::vector<std::string>>& coords);

/// Dense tensor with zeros off the accessed domain; redundant coordinates
/// are filled from the redundancy map when one is given.
template <typename T>
DenseTensor<T> unpack(const CompressedBuffer<T>& c, const IndexFunction& f, const RedundancyMap* redmap,
                      const Binding& binding, const std::vector<std::int64_t>& shape,
                      const std::vector<std::string>& coords);

struct TensorFootprint {
  std::string tensor;
  bool output = false;
  std::int64_t dense = 0;
  std::int64_t compressed = 0;
  Rational rate() const { return Rational(dense) / Rational(compressed == 0 ? 1 : compressed); }
};

/// Element counts of the dense layout versus the registry's buffers.
struct FootprintReport {
  std::vector<TensorFootprint> tensors;
  std::int64_t dense_total = 0;
  std::int64_t compressed_total = 0;

  Rational rate() const;
  const TensorFootprint& tensor(const std::string& name) const;
  std::string str() const;
};

FootprintReport footprint_report(const KernelPlan& plan, const Binding& binding);

/// `shape: d1 d2 ...` header, then row-major values.
template <typename T>
DenseTensor<T> read_tensor(std::istream& in);
template <typename T>
void write_tensor(std::ostream& out, const DenseTensor<T>& t);
template <typename T>
DenseTensor<T> load_tensor(const std::string& path);

/// Reproducible values: integers in [-9, 9], reals in [-10, 10].
template <typename T>
DenseTensor<T> random_tensor(const std::vector<std::int64_t>& shape, std::uint64_t seed);

/// Random dense inputs for every input tensor of the plan.
template <typename T>
std::map<std::string, DenseTensor<T>> random_inputs(const KernelPlan& plan, const Binding& binding,
                                                    std::uint64_t seed);

/// Buffers for `execute`: inputs packed, outputs zero.
template <typename T>
std::vector<std::vector<T>> prepare_buffers(const KernelPlan& plan,
                                            const std::map<std::string, DenseTensor<T>>& inputs,
                                            const Binding& binding);

/// Output tensor gathered from the output buffers.
template <typename T>
DenseTensor<T> gather_output(const KernelPlan& plan, const Program& program,
                             const std::vector<std::vector<T>>& buffers, const Binding& binding);

/// pack, execute, unpack.
template <typename T>
DenseTensor<T> run_compressed(const KernelPlan& plan, const Program& program,
                              const std::map<std::string, DenseTensor<T>>& inputs,
                              const Binding& binding, const ExecOptions& options = {},
                              ExecStats* stats = nullptr);

/// max |got - want| / max(max |want|, 1). Shapes must agree.
template <typename T>
double max_relative_error(const DenseTensor<T>& got, const DenseTensor<T>& want);

}  // namespace polypack
