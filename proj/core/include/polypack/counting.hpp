#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polypack/linear_form.hpp"
#include "polypack/polyhedron.hpp"
#include "polypack/quasi_polynomial.hpp"

namespace polypack {

/// A domain is a union of conjunctions over `vars` and `params`.
using Conjunction = std::vector<Constraint>;

struct Piece {
  std::vector<Conjunction> domain;
  QuasiPolynomial poly;
};

/// Piecewise polynomial with pairwise disjoint piece domains.
struct PiecewiseQuasiPolynomial {
  std::vector<std::string> params;
  std::vector<std::string> vars;
  std::vector<Piece> pieces;

  /// Value of the piece whose domain contains the point. Throws
  /// ErrorKind::Domain outside every piece and ErrorKind::NonIntegral when
  /// the value is fractional (a counting bug).
  std::int64_t evaluate(const Binding& binding) const;
  /// Like evaluate, with `fallback` outside every piece.
  std::int64_t evaluate_or(const Binding& binding, std::int64_t fallback) const;
  bool single_piece() const noexcept { return pieces.size() == 1; }
  std::string str() const;
};

using PiecewiseQP = PiecewiseQuasiPolynomial;

/// Polyhedron view of a conjunction over the variables of a piecewise
/// polynomial (vars become dims).
Polyhedron domain_polyhedron(const Conjunction& c, const std::vector<std::string>& vars,
                             const std::vector<std::string>& params);

/// Number of integer points over `count_dims` (a subset of p.dims), as a
/// function of the params, the outer variables and the remaining dims.
/// Pieces cover every point satisfying the constraints of `p` that do not
/// mention a counted dim; zero-valued pieces fill the empty-range cases.
PiecewiseQP count_points(const Polyhedron& p, const std::vector<std::string>& count_dims,
                         int max_degree = kDefaultMaxDegree);
PiecewiseQP count_points(const Polyhedron& p, int max_degree = kDefaultMaxDegree);

/// Pointwise sum on the common refinement. Zero-valued pieces on which some
/// other piece's polynomial already vanishes are merged into that piece.
PiecewiseQP pw_add(const PiecewiseQP& a, const PiecewiseQP& b);

/// True when `q` is zero at every integer point of `domain`: explicit and
/// implicit equalities are substituted first; when the result is not the
/// zero polynomial, small symbol bindings are enumerated instead.
bool vanishes_on(const QuasiPolynomial& q, const Conjunction& domain,
                 const std::vector<std::string>& vars, const std::vector<std::string>& params);

/// Merges pieces whose polynomials agree on a neighbor's domain.
PiecewiseQP fuse_piecewise(PiecewiseQP t);

/// Fast evaluator over a flat value array.
class CompiledPiecewise {
 public:
  CompiledPiecewise() = default;
  CompiledPiecewise(const PiecewiseQP& pw, const SlotMap& slots);

  std::optional<std::int64_t> try_eval(std::span<const std::int64_t> values) const;
  std::int64_t eval(std::span<const std::int64_t> values) const;

 private:
  struct CompiledPiece {
    std::vector<std::vector<CompiledConstraint>> domain;
    CompiledPolynomial poly;
  };
  std::vector<CompiledPiece> pieces_;
};

}  // namespace polypack
