#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polypack/affine.hpp"
#include "polypack/linear_form.hpp"

namespace polypack {

/// Parametric integer set. `dims` are the set's own coordinates (their order
/// is the lexicographic order and the loop nesting order). `params` are
/// symbols bound to positive integers. `outer` are coordinates of an
/// enclosing context treated as parameters without a sign assumption (the
/// current point of a preceding-access slice, for instance).
struct Polyhedron {
  std::vector<std::string> dims;
  std::vector<std::string> params;
  std::vector<std::string> outer;
  std::vector<Constraint> constraints;
  bool empty = false;

  bool has_mod() const;
  /// Exact membership; `point` must bind every variable the constraints use.
  bool contains(const Binding& point) const;
  std::string str() const;

  friend bool operator==(const Polyhedron&, const Polyhedron&) = default;
};

/// Coordinate selection out of a source polyhedron's dims.
struct AccessMap {
  std::vector<std::string> selected;
};

/// Accessed domain: the image of `space` under `map`. Unselected dims are
/// removed by Fourier-Motzkin elimination; result dims follow the source dim
/// order. `exact` (optional) reports whether every elimination step was an
/// exact integer shadow.
Polyhedron image(const Polyhedron& space, const AccessMap& map, bool* exact = nullptr);

/// Primed name used for slice coordinates.
std::string primed(const std::string& name);

/// Decomposes the set of accessed points lexicographically before the
/// current point into one slice per dim. Slice k ranges over primed dims,
/// with the current dims as `outer`, and includes the membership constraints
/// of the current point.
std::vector<Polyhedron> preceding_slices(const Polyhedron& accessed);

/// Brute-force scanner: a bounding box derived per dim is scanned and every
/// constraint is checked exactly at every candidate point.
class Enumerator {
 public:
  explicit Enumerator(const Polyhedron& p);

  /// Points in lexicographic order of the dims. `binding` must bind every
  /// param and outer variable.
  std::vector<std::vector<std::int64_t>> points(const Binding& binding) const;
  std::int64_t count(const Binding& binding) const;
  /// True as soon as one point is found.
  bool any(const Binding& binding) const;

 private:
  template <typename Visit>
  void scan(const Binding& binding, Visit&& visit) const;

  Polyhedron poly_;
  SlotMap slots_;
  std::size_t first_dim_slot_ = 0;
  // Per dim: candidate bounds as (numerator form, positive divisor).
  struct Bound {
    LinearForm numer;
    std::int64_t div = 1;
  };
  std::vector<std::vector<Bound>> lower_, upper_;
  // Bucket 0 holds dim-free constraints, bucket k+1 those whose innermost
  // dim is dims[k].
  std::vector<std::vector<CompiledConstraint>> checks_;
};

std::vector<std::vector<std::int64_t>> enumerate(const Polyhedron& p, const Binding& binding);

enum class Emptiness { Empty, NonEmpty, Unknown };

/// Tri-state emptiness: Empty when the rational relaxation (with integer
/// tightening) or an equality system is infeasible; NonEmpty when a witness
/// is found under small symbol bindings; Unknown otherwise.
Emptiness is_empty(const Polyhedron& p);

/// Cheap half of is_empty: only the rational contradiction test.
bool rationally_empty(const Polyhedron& p);

/// Positivity assumptions used by the rational tests: the params.
bool implies(const Polyhedron& p, const Constraint& c);

/// Disjoint pieces covering `a` minus `b` (pieces proven empty are dropped).
std::vector<Polyhedron> subtract(const Polyhedron& a, const Polyhedron& b);

/// Rewrites every mod-equality `e mod m = r` as a finite disjunction of
/// equalities `e = r + t*m`, when the range of the quotient t can be proven
/// finite. Returns the alternatives (possibly none, meaning empty) or
/// nullopt when some mod constraint cannot be reduced.
std::optional<std::vector<std::vector<Constraint>>> expand_mod(
    const std::vector<Constraint>& constraints, const std::vector<std::string>& positive);

/// Per-dim (lower, upper) affine bounds over params and outer variables,
/// after eliminating the other dims. Throws ErrorKind::Unbounded when a dim
/// lacks a bound on either side.
struct DimBounds {
  std::vector<Constraint> lower;  // constraints a*d + rest >= 0 with a > 0
  std::vector<Constraint> upper;  // constraints a*d + rest >= 0 with a < 0
};
std::vector<DimBounds> dim_bounds(const Polyhedron& p);

}  // namespace polypack
