#include "polypack/affine.hpp"

#include <numeric>
#include <sstream>

#include "polypack/error.hpp"

namespace polypack {

AffineExpr AffineExpr::var(const std::string& name, Rational coeff) {
  AffineExpr e;
  e.set_coeff(name, coeff);
  return e;
}

Rational AffineExpr::coeff(const std::string& name) const {
  auto it = coeffs_.find(name);
  return it == coeffs_.end() ? Rational(0) : it->second;
}

std::set<std::string> AffineExpr::vars() const {
  std::set<std::string> out;
  for (const auto& [name, c] : coeffs_) out.insert(name);
  return out;
}

void AffineExpr::set_coeff(const std::string& name, Rational value) {
  if (value.is_zero()) {
    coeffs_.erase(name);
  } else {
    coeffs_[name] = value;
  }
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& o) {
  for (const auto& [name, c] : o.coeffs_) set_coeff(name, coeff(name) + c);
  constant_ += o.constant_;
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& o) {
  for (const auto& [name, c] : o.coeffs_) set_coeff(name, coeff(name) - c);
  constant_ -= o.constant_;
  return *this;
}

AffineExpr& AffineExpr::operator*=(const Rational& s) {
  if (s.is_zero()) {
    coeffs_.clear();
    constant_ = 0;
    return *this;
  }
  for (auto& [name, c] : coeffs_) c *= s;
  constant_ *= s;
  return *this;
}

AffineExpr AffineExpr::substitute(const std::string& name, const AffineExpr& value) const {
  auto it = coeffs_.find(name);
  if (it == coeffs_.end()) return *this;
  Rational c = it->second;
  AffineExpr out = *this;
  out.coeffs_.erase(name);
  out += value * c;
  return out;
}

AffineExpr AffineExpr::rename(const std::map<std::string, std::string>& names) const {
  AffineExpr out(constant_);
  for (const auto& [name, c] : coeffs_) {
    auto it = names.find(name);
    const std::string& target = it == names.end() ? name : it->second;
    out.set_coeff(target, out.coeff(target) + c);
  }
  return out;
}

Rational AffineExpr::evaluate(const Binding& binding) const {
  Rational v = constant_;
  for (const auto& [name, c] : coeffs_) {
    auto it = binding.find(name);
    if (it == binding.end()) {
      throw Error(ErrorKind::Binding, "no value bound for '" + name + "'");
    }
    v += c * Rational(it->second);
  }
  return v;
}

bool AffineExpr::has_integer_coeffs() const {
  if (!constant_.is_integer()) return false;
  for (const auto& [name, c] : coeffs_) {
    if (!c.is_integer()) return false;
  }
  return true;
}

std::int64_t AffineExpr::denominator_lcm() const {
  std::int64_t l = constant_.den();
  for (const auto& [name, c] : coeffs_) l = lcm64(l, c.den());
  return l;
}

bool operator<(const AffineExpr& a, const AffineExpr& b) {
  if (a.coeffs_ != b.coeffs_) return a.coeffs_ < b.coeffs_;
  return a.constant_ < b.constant_;
}

std::string AffineExpr::str() const {
  std::ostringstream os;
  bool first = true;
  auto emit = [&](Rational c, const std::string& name) {
    if (first) {
      if (c.sign() < 0) os << "-";
    } else {
      os << (c.sign() < 0 ? " - " : " + ");
    }
    Rational a = c.abs();
    if (name.empty()) {
      os << a;
    } else {
      if (a != Rational(1)) os << a << "*";
      os << name;
    }
    first = false;
  };
  for (const auto& [name, c] : coeffs_) emit(c, name);
  if (!constant_.is_zero() || first) emit(constant_, "");
  return os.str();
}

bool Constraint::mentions(const std::string& name) const {
  return expr.mentions(name) || modulus.mentions(name) || residue.mentions(name);
}

std::set<std::string> Constraint::vars() const {
  std::set<std::string> out = expr.vars();
  for (const auto& v : modulus.vars()) out.insert(v);
  for (const auto& v : residue.vars()) out.insert(v);
  return out;
}

Constraint Constraint::substitute(const std::string& name, const AffineExpr& value) const {
  return {kind, expr.substitute(name, value), modulus.substitute(name, value),
          residue.substitute(name, value)};
}

Constraint Constraint::rename(const std::map<std::string, std::string>& names) const {
  return {kind, expr.rename(names), modulus.rename(names), residue.rename(names)};
}

bool Constraint::holds(const Binding& binding) const {
  Rational v = expr.evaluate(binding);
  switch (kind) {
    case ConstraintKind::Ge: return v.sign() >= 0;
    case ConstraintKind::Eq: return v.is_zero();
    case ConstraintKind::ModEq: {
      if (!v.is_integer()) return false;
      std::int64_t m = modulus.evaluate(binding).to_integer();
      std::int64_t r = residue.evaluate(binding).to_integer();
      if (m <= 0) return false;
      return pos_mod(v.num(), m) == r;
    }
  }
  return false;
}

bool operator<(const Constraint& a, const Constraint& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.expr != b.expr) return a.expr < b.expr;
  if (a.modulus != b.modulus) return a.modulus < b.modulus;
  return a.residue < b.residue;
}

std::string Constraint::str() const {
  switch (kind) {
    case ConstraintKind::Ge: return expr.str() + " >= 0";
    case ConstraintKind::Eq: return expr.str() + " = 0";
    case ConstraintKind::ModEq:
      return "(" + expr.str() + ") % " + modulus.str() + " = " + residue.str();
  }
  return {};
}

Truth normalize(Constraint& c) {
  if (c.kind == ConstraintKind::ModEq) {
    if (!c.expr.has_integer_coeffs()) {
      throw Error(ErrorKind::NonAffine, "mod constraint needs integer coefficients: " + c.str());
    }
    if (c.modulus.is_constant() && c.modulus.constant().sign() <= 0) return Truth::False;
    if (c.modulus.is_constant() && c.residue.is_constant()) {
      std::int64_t m = c.modulus.constant().to_integer();
      std::int64_t r = c.residue.constant().to_integer();
      if (r < 0 || r >= m) return Truth::False;
      if (c.expr.is_constant()) {
        return pos_mod(c.expr.constant().to_integer(), m) == r ? Truth::True : Truth::False;
      }
      // Fold the integer constant modulo m to keep the form canonical.
      c.expr.set_constant(pos_mod(c.expr.constant().to_integer(), m));
    }
    return Truth::Unknown;
  }

  const std::int64_t scale = c.expr.denominator_lcm();
  if (scale != 1) c.expr *= Rational(scale);
  if (c.expr.is_constant()) {
    const Rational& k = c.expr.constant();
    bool ok = c.kind == ConstraintKind::Ge ? k.sign() >= 0 : k.is_zero();
    return ok ? Truth::True : Truth::False;
  }
  std::int64_t g = 0;
  for (const auto& [name, coeff] : c.expr.coeffs()) g = gcd64(g, coeff.num());
  if (c.kind == ConstraintKind::Eq) {
    if (c.expr.constant().num() % g != 0) return Truth::False;
    if (c.expr.coeffs().begin()->second.sign() < 0) g = -g;
    c.expr *= Rational(1, g);
  } else if (g != 1) {
    std::int64_t k = floor_div(c.expr.constant().num(), g);
    c.expr.set_constant(0);
    c.expr *= Rational(1, g);
    c.expr.set_constant(k);
  }
  return Truth::Unknown;
}

Constraint negate_ge(const Constraint& c) {
  return Constraint::ge(-c.expr - AffineExpr(Rational(1)));
}

std::string to_string(const std::vector<Constraint>& cs) {
  std::string out = "{";
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i) out += ", ";
    out += cs[i].str();
  }
  return out + "}";
}

}  // namespace polypack
