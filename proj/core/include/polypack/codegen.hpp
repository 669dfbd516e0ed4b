#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polypack/indexing.hpp"
#include "polypack/stur.hpp"
#include "polypack/tensor.hpp"

namespace polypack {

/// `ceil(numer / div)` for lower bounds, `floor(numer / div)` for upper
/// bounds; `div` is positive and `numer` has integer coefficients.
struct LoopBound {
  AffineExpr numer;
  std::int64_t div = 1;
};

struct LoopLevel {
  std::string iter;
  std::vector<LoopBound> lower;
  std::vector<LoopBound> upper;
  /// Defined by a unit-coefficient equality: one iteration at `lower[0]`.
  bool single = false;
  /// Strided levels visit iter = target (mod modulus) only.
  bool strided = false;
  AffineExpr modulus;
  AffineExpr target;
  /// Residual constraints checked once this level's iterator is set.
  std::vector<Constraint> guards;
};

struct LoopNest {
  std::vector<std::string> params;
  std::vector<LoopLevel> levels;
  /// Symbol-only constraints checked before the outermost loop.
  std::vector<Constraint> guards;
  bool empty = false;

  /// Iteration vectors in visiting order (testing aid).
  std::vector<std::vector<std::int64_t>> scan(const Binding& binding) const;
  /// Pseudocode rendering.
  std::string str() const;
};

/// Per-level bounds from Fourier-Motzkin projection onto the outer dims
/// and symbols; mod-equalities become strides where possible, guards
/// otherwise.
LoopNest build_loop_nest(const Polyhedron& space);

enum class Compression { None, Input, InputOutput };
const char* to_string(Compression c);
Compression parse_compression(const std::string& text);

/// Identity schedule; other schedules are representable but rejected.
struct Schedule {
  std::vector<std::string> order;
  bool identity() const { return true; }
};

struct SummandPlan {
  Summand summand;
  Polyhedron space;
  LoopNest nest;
  Schedule schedule;
  /// The outermost iterator indexes the output, so chunks of its range
  /// write disjoint output positions.
  bool parallelizable = false;
};

struct KernelPlan {
  std::string rule;
  std::vector<std::string> params;
  std::vector<SummandPlan> summands;
  BufferRegistry registry;
  Compression compression = Compression::InputOutput;
  std::map<std::string, std::vector<AffineExpr>> shapes;
  std::string output;
  std::vector<std::string> inputs;

  /// Buffer lengths at a binding, indexed by buffer id.
  std::vector<std::int64_t> buffer_lengths(const Binding& binding) const;
  /// Buffer ids written by the kernel.
  std::vector<int> output_buffers() const;
  /// Human-readable buffers, index polynomials and loop nests.
  std::string describe() const;
};

/// Declared shapes, completed for undeclared tensors from the first upper
/// bound of each coordinate in the unique set (or in the rule summands).
std::map<std::string, std::vector<AffineExpr>> resolve_shapes(const Program& p,
                                                              const std::string& rule);

/// Index polynomial of one access (0 = output) over the summand iterators
/// and symbols: the buffer rank renamed to the access indices, or the
/// row-major offset for a dense buffer.
PiecewiseQP access_index(const KernelPlan& plan, std::size_t summand, std::size_t access);

std::vector<std::int64_t> evaluate_shape(const std::vector<AffineExpr>& shape,
                                         const Binding& binding);

KernelPlan compile_rule(const Program& p, const std::string& rule,
                        Compression compression = Compression::InputOutput);

struct ExecOptions {
  int workers = 1;
  /// Compare every hoisted index against direct polynomial evaluation.
  bool check_hoisting = false;
  /// Test hook: shift every index of this input tensor by one slot.
  std::optional<std::string> corrupt_tensor;
};

struct ExecStats {
  std::uint64_t iterations = 0;
  std::uint64_t hoist_checks = 0;
};

/// Runs the plan over `buffers` (indexed by buffer id and sized by
/// buffer_lengths). Output buffers are zeroed first. Throws
/// ErrorKind::IndexOutOfRange on any out-of-range index.
template <typename T>
ExecStats execute(const KernelPlan& plan, std::vector<std::vector<T>>& buffers,
                  const Binding& binding, const ExecOptions& options = {});

/// Dense oracle: nested loops over the shape box of every summand,
/// honoring the summand constraints and the unique sets of the accesses.
template <typename T>
DenseTensor<T> reference_execute(const Program& p, const std::string& rule,
                                 const std::map<std::string, DenseTensor<T>>& inputs,
                                 const Binding& binding);

/// One C99 translation unit per summand, keyed by `<rule>_<summand>.c`.
std::map<std::string, std::string> emit_c(const KernelPlan& plan);

}  // namespace polypack
