#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "polypack/error.hpp"

namespace polypack {

/// Row-major dense tensor.
template <typename T>
struct DenseTensor {
  std::vector<std::int64_t> shape;
  std::vector<T> data;

  DenseTensor() = default;
  explicit DenseTensor(std::vector<std::int64_t> extents)
      : shape(std::move(extents)), data(static_cast<std::size_t>(element_count(shape)), T{}) {}

  static std::int64_t element_count(const std::vector<std::int64_t>& extents) {
    std::int64_t n = 1;
    for (auto e : extents) n *= e;
    return n;
  }

  std::int64_t offset(const std::vector<std::int64_t>& index) const {
    if (index.size() != shape.size()) {
      throw Error(ErrorKind::Arity, "index arity does not match tensor rank");
    }
    std::int64_t off = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) {
      if (index[k] < 0 || index[k] >= shape[k]) {
        throw Error(ErrorKind::IndexOutOfRange,
                    "coordinate " + std::to_string(index[k]) + " outside extent " +
                        std::to_string(shape[k]));
      }
      off = off * shape[k] + index[k];
    }
    return off;
  }

  T& at(const std::vector<std::int64_t>& index) { return data[static_cast<std::size_t>(offset(index))]; }
  const T& at(const std::vector<std::int64_t>& index) const {
    return data[static_cast<std::size_t>(offset(index))];
  }
};

}  // namespace polypack
