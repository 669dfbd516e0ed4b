#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "polypack/counting.hpp"
#include "polypack/indexing.hpp"
#include "suite.hpp"

namespace acceptance {

/// Params that `f` actually depends on.
inline std::vector<std::string> relevant_params(const polypack::IndexFunction& f) {
  std::set<std::string> used;
  auto add_constraints = [&](const std::vector<polypack::Constraint>& cs) {
    for (const auto& c : cs) {
      for (const auto& x : c.vars()) used.insert(x);
    }
  };
  add_constraints(f.accessed.constraints);
  for (const auto* pw : {&f.rank, &f.size}) {
    for (const auto& piece : pw->pieces) {
      for (const auto& conj : piece.domain) add_constraints(conj);
      for (const auto& x : piece.poly.vars()) used.insert(x);
    }
  }
  std::vector<std::string> out;
  for (const auto& p : f.accessed.params) {
    if (used.count(p)) out.push_back(p);
  }
  return out;
}

/// Every binding of `symbols` over {1, ..., 8} (the product has at most 8^4
/// elements for the builtins).
inline std::vector<polypack::Binding> all_bindings(const std::vector<std::string>& symbols) {
  return oracle::small_bindings(symbols, 4096, 1);
}

/// Every symbol of `plan` not in `b` is bound to 1.
inline polypack::Binding complete(polypack::Binding b, const std::vector<std::string>& params) {
  for (const auto& p : params) b.emplace(p, 1);
  return b;
}

}  // namespace acceptance
