#pragma once

#include <string>
#include <vector>

#include "polypack/affine.hpp"

namespace polypack {

/// A kernel shipped as STUR source. Every builtin computes rule `A`.
struct BuiltinKernel {
  std::string name;
  std::string family;
  std::string structure;
  std::string source;
  /// One of the twelve evaluation kernels (as opposed to the extra
  /// strided-diagonal and sub-triangular structures).
  bool evaluation = true;
};

const std::vector<BuiltinKernel>& builtin_kernels();
/// Throws ErrorKind::UnknownIdentifier for an unknown name.
const BuiltinKernel& builtin_kernel(const std::string& name);

/// Values for `symbols`. Explicit entries win; a plain `n` fills every
/// extent symbol (`n_*` and `N`), and the fixed-index symbols `I`, `J`
/// and `k` default to n/2. Throws ErrorKind::Binding when a symbol stays
/// unbound.
Binding resolve_binding(const std::vector<std::string>& symbols, const Binding& given);

}  // namespace polypack
