#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polypack/affine.hpp"
#include "polypack/linear_form.hpp"

namespace polypack {

/// Variable -> exponent (all exponents positive). The empty monomial is 1.
using Monomial = std::map<std::string, int>;

/// Polynomial with rational coefficients over iterators and symbols. Only
/// the polynomial (non-periodic) subclass of quasi-polynomials is
/// represented; periodic counts are rejected upstream.
class QuasiPolynomial {
 public:
  QuasiPolynomial() = default;
  QuasiPolynomial(Rational constant);  // NOLINT(implicit)
  explicit QuasiPolynomial(const AffineExpr& e);
  static QuasiPolynomial var(const std::string& name);

  const std::map<Monomial, Rational>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const;
  Rational constant() const;
  std::set<std::string> vars() const;
  bool mentions(const std::string& name) const;
  int degree() const;
  int degree_in(const std::string& name) const;
  /// Coefficients of successive powers of `name` (index = exponent).
  std::vector<QuasiPolynomial> coefficients_in(const std::string& name) const;

  QuasiPolynomial& operator+=(const QuasiPolynomial& o);
  QuasiPolynomial& operator-=(const QuasiPolynomial& o);
  QuasiPolynomial& operator*=(const QuasiPolynomial& o);
  friend QuasiPolynomial operator+(QuasiPolynomial a, const QuasiPolynomial& b) { return a += b; }
  friend QuasiPolynomial operator-(QuasiPolynomial a, const QuasiPolynomial& b) { return a -= b; }
  friend QuasiPolynomial operator*(QuasiPolynomial a, const QuasiPolynomial& b) { return a *= b; }
  QuasiPolynomial operator-() const;
  QuasiPolynomial pow(int k) const;

  QuasiPolynomial substitute(const std::string& name, const QuasiPolynomial& value) const;
  QuasiPolynomial substitute(const std::string& name, const AffineExpr& value) const {
    return substitute(name, QuasiPolynomial(value));
  }
  QuasiPolynomial rename(const std::map<std::string, std::string>& names) const;

  /// Exact value; throws ErrorKind::Binding when a variable is unbound.
  Rational evaluate(const Binding& binding) const;
  /// Least common multiple of the coefficient denominators.
  std::int64_t denominator_lcm() const;

  friend bool operator==(const QuasiPolynomial&, const QuasiPolynomial&) = default;
  friend bool operator<(const QuasiPolynomial& a, const QuasiPolynomial& b) {
    return a.terms_ < b.terms_;
  }

  /// Canonical text, e.g. "1/2*i + 1/2*i^2 + j" (constant last).
  std::string str() const;

 private:
  void add_term(const Monomial& m, const Rational& c);
  std::map<Monomial, Rational> terms_;
};

/// Default maximum degree accepted by faulhaber_sum.
inline constexpr int kDefaultMaxDegree = 6;

/// Bernoulli number B_k with the B_1 = +1/2 convention.
Rational bernoulli(int k);

/// Power sum S_k(n) = 1^k + ... + n^k as a polynomial in `n`.
QuasiPolynomial power_sum(int k, const QuasiPolynomial& n);

/// Closed form of the sum of `p` for `v` from `lb` to `ub`, valid whenever
/// ub >= lb - 1. Throws ErrorKind::DegreeOverflow past `max_degree`.
QuasiPolynomial faulhaber_sum(const QuasiPolynomial& p, const std::string& v,
                              const AffineExpr& lb, const AffineExpr& ub,
                              int max_degree = kDefaultMaxDegree);

/// Integer-only evaluator: the polynomial scaled by the lcm of its
/// denominators, evaluated in 128-bit arithmetic and divided back exactly.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  CompiledPolynomial(const QuasiPolynomial& p, const SlotMap& slots);

  /// Throws ErrorKind::NonIntegral when the value is not an integer and
  /// ErrorKind::Overflow when it does not fit in 64 bits.
  std::int64_t eval(std::span<const std::int64_t> values) const;

 private:
  struct Term {
    std::int64_t coeff;
    std::vector<std::pair<int, int>> factors;  // (slot, exponent)
  };
  std::vector<Term> terms_;
  std::int64_t scale_ = 1;
};

}  // namespace polypack
