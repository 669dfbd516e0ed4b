#include "polypack/kernels.hpp"

#include "polypack/error.hpp"

namespace polypack {

namespace {

const char* kTtm =
    "A(i, j, k) := B(i, j, l) * C(k, l)\n"
    "A_S := (n_i, n_j, n_k)\n"
    "B_S := (n_i, n_j, n_l)\n"
    "C_S := (n_k, n_l)\n"
    "C_U(k, l) := (0 <= k < n_k) * (0 <= l < n_l)\n";

const char* kThp =
    "A(i, j, k) := B(i, j, k) * C(i, j, k)\n"
    "A_S := (n_i, n_j, n_k)\n"
    "B_S := (n_i, n_j, n_k)\n"
    "C_S := (n_i, n_j, n_k)\n"
    "C_U(i, j, k) := (0 <= i < n_i) * (0 <= j < n_j) * (0 <= k < n_k)\n";

const char* kMtt =
    "A(i, j) := B(i, k, l) * C(k, j) * D(l, j)\n"
    "A_S := (n_i, n_j)\n"
    "B_S := (n_i, n_k, n_l)\n"
    "C_S := (n_k, n_j)\n"
    "D_S := (n_l, n_j)\n"
    "C_U(k, j) := (0 <= k < n_k) * (0 <= j < n_j)\n";

const char* kSpmv =
    "A(i) := B(i, j) * C(j)\n"
    "A_S := (n_i)\n"
    "B_S := (n_i, n_j)\n"
    "C_S := (n_j)\n"
    "C_U(j) := (0 <= j < n_j)\n";

const char* kSquare =
    "A(i) := B(i, j) * C(j)\n"
    "A_S := (N)\n"
    "B_S := (N, N)\n"
    "C_S := (N)\n"
    "C_U(j) := (0 <= j < N)\n";

std::vector<BuiltinKernel> make_kernels() {
  auto k = [](const char* name, const char* family, const char* structure, const char* base,
              const std::string& unique, bool evaluation = true) {
    return BuiltinKernel{name, family, structure, std::string(base) + unique, evaluation};
  };
  return {
      k("TTM_DP", "TTM", "diagonal plane", kTtm, "B_U(i, j, l) := (0 <= i < n_i) * (i = j) * (0 <= l < n_l)\n"),
      k("TTM_J", "TTM", "fixed j", kTtm, "B_U(i, j, l) := (0 <= i < n_i) * (j = J) * (0 <= l < n_l)\n"),
      k("TTM_UT", "TTM", "upper half cube", kTtm,
        "B_U(i, j, l) := (0 <= i < n_i) * (i <= j < n_j) * (0 <= l < n_l)\n"),
      k("THP_DP", "THP", "diagonal plane", kThp, "B_U(i, j, l) := (0 <= i < n_i) * (i = j) * (0 <= l < n_k)\n"),
      k("THP_I", "THP", "fixed i", kThp, "B_U(i, j, l) := (i = I) * (0 <= j < n_j) * (0 <= l < n_k)\n"),
      k("THP_J", "THP", "fixed j", kThp, "B_U(i, j, l) := (0 <= i < n_i) * (j = J) * (0 <= l < n_k)\n"),
      k("MTT_D", "MTTKRP", "diagonal", kMtt,
        "B_U(i, k, l) := (i = k = l) * (0 <= i < n_i)\n"
        "D_U(l, j) := (l = j) * (0 <= l < n_l) * (0 <= j < n_j)\n"),
      k("MTT_JUT", "MTTKRP", "fixed j and upper half cube", kMtt,
        "B_U(i, k, l) := (0 <= i < k) * (0 <= k < n_k) * (0 <= l < n_l)\n"
        "D_U(l, j) := (0 <= l < n_l) * (j = J)\n"),
      k("MTT_J", "MTTKRP", "fixed j", kMtt,
        "B_U(i, k, l) := (0 <= i < n_i) * (0 <= k < n_k) * (0 <= l < n_l)\n"
        "D_U(l, j) := (0 <= l < n_l) * (j = J)\n"),
      k("SpMV_L", "SpMV", "Leslie", kSpmv,
        "B_U(i, j) := (i = 0) * (0 <= j < n_j) + (1 <= i < n_i) * (j = i - 1)\n"),
      k("SpMV_UT", "SpMV", "upper triangular", kSpmv, "B_U(i, j) := (0 <= i < n_i) * (i <= j < n_j)\n"),
      k("SpMV_D", "SpMV", "diagonal", kSpmv, "B_U(i, j) := (0 <= i < n_i) * (i = j)\n"),
      k("SD1", "SpMV", "strided diagonal, stride 1", kSquare,
        "B_U(i, j) := (0 <= i < N) * (0 <= j < N) * ((j - i) % N = 1)\n", false),
      k("SD2", "SpMV", "strided diagonal, stride 2", kSquare,
        "B_U(i, j) := (0 <= i < N) * (0 <= j < N) * ((j - i) % N = 2)\n", false),
      k("SD3", "SpMV", "strided diagonal, stride 3", kSquare,
        "B_U(i, j) := (0 <= i < N) * (0 <= j < N) * ((j - i) % N = 3)\n", false),
      k("ST", "SpMV", "sub-triangular", kSquare,
        "B_U(i, j) := (0 <= i < N) * (0 <= j < N) * (j - i >= N - k)\n", false),
  };
}

}  // namespace

const std::vector<BuiltinKernel>& builtin_kernels() {
  static const std::vector<BuiltinKernel> kernels = make_kernels();
  return kernels;
}

const BuiltinKernel& builtin_kernel(const std::string& name) {
  for (const auto& k : builtin_kernels()) {
    if (k.name == name) return k;
  }
  throw Error(ErrorKind::UnknownIdentifier, "unknown builtin kernel '" + name + "'");
}

Binding resolve_binding(const std::vector<std::string>& symbols, const Binding& given) {
  Binding out;
  auto n = given.find("n");
  for (const auto& s : symbols) {
    if (auto it = given.find(s); it != given.end()) {
      out[s] = it->second;
    } else if (n != given.end() && (s == "N" || s.rfind("n_", 0) == 0)) {
      out[s] = n->second;
    } else if (n != given.end() && (s == "I" || s == "J" || s == "k")) {
      out[s] = n->second / 2;
    } else {
      throw Error(ErrorKind::Binding, "no value bound for symbol '" + s + "'");
    }
  }
  return out;
}

}  // namespace polypack
