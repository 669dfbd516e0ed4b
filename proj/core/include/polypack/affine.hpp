#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "polypack/rational.hpp"

namespace polypack {

/// Values for symbols (and, where relevant, iterators) at evaluation time.
using Binding = std::map<std::string, std::int64_t>;

/// Exact-rational linear form over named iterators and symbols. Zero
/// coefficients are never stored.
class AffineExpr {
 public:
  AffineExpr() = default;
  AffineExpr(Rational constant) : constant_(constant) {}  // NOLINT(implicit)
  static AffineExpr var(const std::string& name, Rational coeff = 1);

  const std::map<std::string, Rational>& coeffs() const noexcept { return coeffs_; }
  const Rational& constant() const noexcept { return constant_; }
  Rational coeff(const std::string& name) const;
  bool mentions(const std::string& name) const { return coeffs_.count(name) != 0; }
  bool is_constant() const noexcept { return coeffs_.empty(); }
  std::set<std::string> vars() const;

  void set_coeff(const std::string& name, Rational value);
  void set_constant(Rational value) { constant_ = value; }

  AffineExpr& operator+=(const AffineExpr& o);
  AffineExpr& operator-=(const AffineExpr& o);
  AffineExpr& operator*=(const Rational& s);
  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator*(AffineExpr a, const Rational& s) { return a *= s; }
  friend AffineExpr operator*(const Rational& s, AffineExpr a) { return a *= s; }
  AffineExpr operator-() const { return *this * Rational(-1); }

  /// Replaces `name` by `value` (simultaneous with nothing else).
  AffineExpr substitute(const std::string& name, const AffineExpr& value) const;
  /// Simultaneous renaming of variables.
  AffineExpr rename(const std::map<std::string, std::string>& names) const;

  Rational evaluate(const Binding& binding) const;
  bool has_integer_coeffs() const;
  /// Least common multiple of all denominators (coefficients and constant).
  std::int64_t denominator_lcm() const;

  friend bool operator==(const AffineExpr&, const AffineExpr&) = default;
  friend bool operator<(const AffineExpr& a, const AffineExpr& b);

  std::string str() const;

 private:
  std::map<std::string, Rational> coeffs_;
  Rational constant_;
};

enum class ConstraintKind { Ge, Eq, ModEq };

/// Normalized comparison: `expr >= 0`, `expr = 0`, or
/// `expr mod modulus = residue` where modulus/residue are integer literals or
/// single symbols.
struct Constraint {
  ConstraintKind kind = ConstraintKind::Ge;
  AffineExpr expr;
  AffineExpr modulus;  // ModEq only
  AffineExpr residue;  // ModEq only

  static Constraint ge(AffineExpr e) { return {ConstraintKind::Ge, std::move(e), {}, {}}; }
  static Constraint eq(AffineExpr e) { return {ConstraintKind::Eq, std::move(e), {}, {}}; }
  static Constraint mod_eq(AffineExpr e, AffineExpr m, AffineExpr r) {
    return {ConstraintKind::ModEq, std::move(e), std::move(m), std::move(r)};
  }

  bool mentions(const std::string& name) const;
  std::set<std::string> vars() const;
  Constraint substitute(const std::string& name, const AffineExpr& value) const;
  Constraint rename(const std::map<std::string, std::string>& names) const;
  /// Exact membership test for integer points.
  bool holds(const Binding& binding) const;

  friend bool operator==(const Constraint&, const Constraint&) = default;
  friend bool operator<(const Constraint& a, const Constraint& b);

  std::string str() const;
};

enum class Truth { False, True, Unknown };

/// Brings a constraint to canonical integer form: integer coefficients with
/// unit gcd, integer tightening of the constant for inequalities, positive
/// leading coefficient for equalities. Returns True/False for constant
/// constraints and Unknown otherwise (with `c` rewritten in place).
Truth normalize(Constraint& c);

/// The integer complement of a normalized inequality (`e >= 0` -> `-e-1 >= 0`).
Constraint negate_ge(const Constraint& c);

std::string to_string(const std::vector<Constraint>& cs);

}  // namespace polypack
