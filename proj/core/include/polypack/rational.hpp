#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace polypack {

/// Exact rational with 64-bit numerator and denominator. Intermediate
/// products use 128-bit arithmetic; results that do not fit throw
/// Error(ErrorKind::Overflow) instead of wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT(implicit)
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }

  bool is_zero() const noexcept { return num_ == 0; }
  bool is_integer() const noexcept { return den_ == 1; }
  int sign() const noexcept { return (num_ > 0) - (num_ < 0); }

  std::int64_t floor() const;
  std::int64_t ceil() const;
  /// Value as integer; throws Error(NonIntegral) when the denominator is not 1.
  std::int64_t to_integer() const;
  double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  Rational abs() const { return sign() < 0 ? -*this : *this; }

  std::string str() const;

 private:
  static Rational from_wide(__int128 num, __int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

std::int64_t gcd64(std::int64_t a, std::int64_t b);
std::int64_t lcm64(std::int64_t a, std::int64_t b);
std::int64_t floor_div(std::int64_t a, std::int64_t b);
std::int64_t ceil_div(std::int64_t a, std::int64_t b);
/// Mathematical (non-negative) remainder for positive modulus.
std::int64_t pos_mod(std::int64_t a, std::int64_t m);

/// Overflow-checked 64-bit helpers used by the evaluators.
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

}  // namespace polypack
