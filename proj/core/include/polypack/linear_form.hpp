#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polypack/affine.hpp"

namespace polypack {

/// Name -> position in a flat value array.
class SlotMap {
 public:
  int add(const std::string& name);
  int at(const std::string& name) const;
  bool contains(const std::string& name) const { return slots_.count(name) != 0; }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  std::map<std::string, int> slots_;
  std::vector<std::string> names_;
};

/// Integer-coefficient affine form over a flat value array; the hot-path
/// counterpart of AffineExpr.
struct LinearForm {
  std::vector<std::pair<int, std::int64_t>> terms;
  std::int64_t constant = 0;

  static LinearForm compile(const AffineExpr& e, const SlotMap& slots);

  std::int64_t eval(std::span<const std::int64_t> values) const {
    std::int64_t v = constant;
    for (const auto& [slot, c] : terms) v += c * values[slot];
    return v;
  }
};

/// Compiled constraint (inequality, equality or mod-equality) for exact
/// membership checks.
struct CompiledConstraint {
  ConstraintKind kind = ConstraintKind::Ge;
  LinearForm expr;
  LinearForm modulus;
  LinearForm residue;

  static CompiledConstraint compile(const Constraint& c, const SlotMap& slots);
  bool holds(std::span<const std::int64_t> values) const;
};

}  // namespace polypack
