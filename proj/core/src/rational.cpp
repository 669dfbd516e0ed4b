#include "polypack/rational.hpp"

#include <limits>
#include <ostream>

#include "polypack/error.hpp"

namespace polypack {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "syntax error";
    case ErrorKind::UnknownIdentifier: return "unknown identifier";
    case ErrorKind::NonAffine: return "non-affine expression";
    case ErrorKind::Arity: return "arity mismatch";
    case ErrorKind::Unbounded: return "unbounded iterator";
    case ErrorKind::PeriodicCount: return "unsupported: periodic count";
    case ErrorKind::ProjectionBlocked: return "projection blocked by mod constraint";
    case ErrorKind::DegreeOverflow: return "degree overflow";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::NonIntegral: return "non-integral value";
    case ErrorKind::IndexOutOfRange: return "compressed index out of range";
    case ErrorKind::Binding: return "binding error";
    case ErrorKind::Overflow: return "arithmetic overflow";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

namespace {

using i128 = __int128;

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits64(i128 v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

[[noreturn]] void overflow() {
  throw Error(ErrorKind::Overflow, "rational arithmetic overflow");
}

}  // namespace

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(gcd128(a, b));
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  i128 l = static_cast<i128>(a / gcd64(a, b)) * b;
  if (l < 0) l = -l;
  if (!fits64(l)) overflow();
  return static_cast<std::int64_t>(l);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
  return q;
}

std::int64_t pos_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) overflow();
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) overflow();
  return r;
}

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorKind::Domain, "rational with zero denominator");
  *this = from_wide(num, den);
}

Rational Rational::from_wide(i128 num, i128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (!fits64(num) || !fits64(den)) overflow();
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = num == 0 ? 1 : static_cast<std::int64_t>(den);
  return r;
}

std::int64_t Rational::floor() const { return floor_div(num_, den_); }
std::int64_t Rational::ceil() const { return ceil_div(num_, den_); }

std::int64_t Rational::to_integer() const {
  if (den_ != 1) {
    throw Error(ErrorKind::NonIntegral, "expected an integer, got " + str());
  }
  return num_;
}

Rational Rational::operator-() const { return from_wide(-static_cast<i128>(num_), den_); }

Rational& Rational::operator+=(const Rational& o) {
  if (den_ == 1 && o.den_ == 1) {
    *this = Rational(checked_add(num_, o.num_));
    return *this;
  }
  *this = from_wide(static_cast<i128>(num_) * o.den_ + static_cast<i128>(o.num_) * den_,
                    static_cast<i128>(den_) * o.den_);
  return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
  if (den_ == 1 && o.den_ == 1) {
    *this = Rational(checked_mul(num_, o.num_));
    return *this;
  }
  *this = from_wide(static_cast<i128>(num_) * o.num_, static_cast<i128>(den_) * o.den_);
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw Error(ErrorKind::Domain, "rational division by zero");
  *this = from_wide(static_cast<i128>(num_) * o.den_, static_cast<i128>(den_) * o.num_);
  return *this;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  i128 l = static_cast<i128>(a.num_) * b.den_;
  i128 r = static_cast<i128>(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace polypack
