#include "polypack/linear_form.hpp"

#include "polypack/error.hpp"

namespace polypack {

int SlotMap::add(const std::string& name) {
  auto [it, inserted] = slots_.try_emplace(name, static_cast<int>(names_.size()));
  if (inserted) names_.push_back(name);
  return it->second;
}

int SlotMap::at(const std::string& name) const {
  auto it = slots_.find(name);
  if (it == slots_.end()) {
    throw Error(ErrorKind::Binding, "no slot for variable '" + name + "'");
  }
  return it->second;
}

LinearForm LinearForm::compile(const AffineExpr& e, const SlotMap& slots) {
  if (!e.has_integer_coeffs()) {
    throw Error(ErrorKind::NonIntegral, "linear form needs integer coefficients: " + e.str());
  }
  LinearForm f;
  f.constant = e.constant().num();
  for (const auto& [name, c] : e.coeffs()) f.terms.emplace_back(slots.at(name), c.num());
  return f;
}

CompiledConstraint CompiledConstraint::compile(const Constraint& c, const SlotMap& slots) {
  CompiledConstraint out;
  out.kind = c.kind;
  out.expr = LinearForm::compile(c.expr, slots);
  if (c.kind == ConstraintKind::ModEq) {
    out.modulus = LinearForm::compile(c.modulus, slots);
    out.residue = LinearForm::compile(c.residue, slots);
  }
  return out;
}

bool CompiledConstraint::holds(std::span<const std::int64_t> values) const {
  std::int64_t v = expr.eval(values);
  switch (kind) {
    case ConstraintKind::Ge: return v >= 0;
    case ConstraintKind::Eq: return v == 0;
    case ConstraintKind::ModEq: {
      std::int64_t m = modulus.eval(values);
      if (m <= 0) return false;
      return pos_mod(v, m) == residue.eval(values);
    }
  }
  return false;
}

}  // namespace polypack
