#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "polypack/counting.hpp"
#include "polypack/stur.hpp"

namespace polypack {

/// Compressed layout of one accessed region: rank maps each accessed
/// coordinate to its position in a densely packed buffer of `size` slots.
struct IndexFunction {
  std::string tensor;
  /// Dims are the access iterators in iteration-space order.
  Polyhedron accessed;
  PiecewiseQP rank;
  PiecewiseQP size;
  /// False when some projection step was not an exact integer shadow.
  bool exact = true;
};

/// Accessed domain, preceding-access slices, symbolic counts and fusion.
IndexFunction symbolic_indexing(const Polyhedron& space, const AccessMap& access,
                                const std::string& tensor);

/// One hoisted term: a coefficient over the symbols times a monomial in
/// the loop iterators.
struct HoistTerm {
  QuasiPolynomial coeff;
  Monomial iters;
};

/// Per-loop-level partial sums. Level 0 holds the symbol-only part; level k
/// holds the terms whose innermost iterator is dims[k-1].
struct HoistSchedule {
  std::vector<std::string> dims;
  std::vector<std::vector<HoistTerm>> levels;

  /// Coefficients that depend on symbols only and can be computed before
  /// the outermost loop.
  std::vector<QuasiPolynomial> hoisted_constants() const;
  Rational evaluate(const Binding& binding) const;
  std::string str() const;
};

HoistSchedule hoist_schedule(const QuasiPolynomial& rank, const std::vector<std::string>& dims);

/// Compact text for a symbol-only coefficient, with a common monomial
/// factored out: "(N - 1/2)*Q".
std::string factored_str(const QuasiPolynomial& p);

/// Position of an access inside a kernel: summand index and access index
/// (0 is the output, k >= 1 is input k-1).
using AccessRef = std::pair<std::size_t, std::size_t>;

struct Buffer {
  int id = 0;
  std::string tensor;
  bool dense = false;
  /// Why a tensor is stored dense: "uncompressed" or "partial-overlap".
  std::string reason;
  /// Compressed buffers: the layout of the first access that created it,
  /// whose iterator names are `coords` (one per tensor coordinate).
  IndexFunction index;
  std::vector<std::string> coords;
  /// Dense buffers: extents per coordinate.
  std::vector<AffineExpr> shape;
};

struct BufferRegistry {
  std::vector<Buffer> buffers;
  std::map<AccessRef, int> assignment;

  const Buffer& buffer_for(const AccessRef& ref) const;
  std::vector<int> buffers_of(const std::string& tensor) const;
  /// One line per buffer: `tensor=B id=0 size=<poly> rank=<poly> domain=<constraints>`.
  std::string dump() const;
};

struct SummandSpace {
  Summand summand;
  Polyhedron space;
};

/// Buffers for every access. Tensors outside `compressed` are dense; among
/// compressed tensors, equal accessed domains share one buffer, disjoint
/// ones get separate buffers and partial overlap demotes the whole tensor
/// to a dense layout.
BufferRegistry build_registry(const std::vector<SummandSpace>& summands,
                              const std::set<std::string>& compressed,
                              const std::map<std::string, std::vector<AffineExpr>>& shapes);

/// Equality of two accessed domains written over tensor coordinates.
enum class RegionRelation { Equal, Disjoint, Overlap };
RegionRelation compare_regions(const Polyhedron& a, const Polyhedron& b);

/// Accessed domain with dims renamed to coordinate placeholders `$0`, `$1`,
/// ... in the tensor's coordinate order.
Polyhedron coordinate_domain(const Polyhedron& accessed, const std::vector<std::string>& indices);

}  // namespace polypack
