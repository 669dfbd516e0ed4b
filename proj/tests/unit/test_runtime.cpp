#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "oracle.hpp"
#include "polypack/counting.hpp"
#include "polypack/error.hpp"
#include "polypack/kernels.hpp"
#include "polypack/runtime.hpp"
#include "polypack/stur.hpp"
#include "suite.hpp"

using namespace polypack;

namespace {

const Buffer& buffer_of(const KernelPlan& plan, const std::string& tensor) {
  for (const auto& b : plan.registry.buffers) {
    if (b.tensor == tensor) return b;
  }
  throw std::runtime_error("no buffer for " + tensor);
}

DenseTensor<std::int64_t> iota(std::vector<std::int64_t> shape) {
  DenseTensor<std::int64_t> t(std::move(shape));
  for (std::size_t k = 0; k < t.data.size(); ++k) t.data[k] = static_cast<std::int64_t>(k) + 1;
  return t;
}

const char* kLower =
    "A(i) := B(i, j) * C(j)\n"
    "A_S := (n)\n"
    "B_S := (n, n)\n"
    "C_S := (n)\n"
    "B_U(i, j) := (0 <= j <= i) * (i < n)\n"
    "B_R(i, j, i', j') := (i < j) * (i' = j) * (j' = i)\n"
    "C_U(j) := (0 <= j < n)\n";

}  // namespace

TEST(Pack, Diagonal) {
  auto plan = suite::compile("SpMV_D").plan;
  const auto& buf = buffer_of(plan, "B");
  DenseTensor<std::int64_t> t({3, 3});
  t.at({0, 0}) = 1;
  t.at({1, 1}) = 2;
  t.at({2, 2}) = 3;
  auto c = pack(t, buf.index, {{"n_i", 3}, {"n_j", 3}}, buf.coords);
  EXPECT_EQ(c.length, 3);
  EXPECT_EQ(c.data, (std::vector<std::int64_t>{1, 2, 3}));
}

TEST(Pack, LowerTriangleInLexOrder) {
  auto plan = compile_rule(parse_program(kLower), "A");
  const auto& buf = buffer_of(plan, "B");
  auto c = pack(iota({3, 3}), buf.index, {{"n", 3}}, buf.coords);
  EXPECT_EQ(c.data, (std::vector<std::int64_t>{1, 4, 5, 7, 8, 9}));
}

TEST(Pack, UpperHalfCubeLength) {
  auto p = parse_program(
      "A(i, j, k) := B(i, j, l) * C(k, l)\n"
      "B_U(i, j, l) := (0 <= i < M) * (i <= j < N) * (0 <= l < Q)\n"
      "C_U(k, l) := (0 <= k < P) * (0 <= l < Q)\n");
  auto plan = compile_rule(p, "A");
  const auto& buf = buffer_of(plan, "B");
  const Binding b{{"M", 2}, {"N", 2}, {"P", 2}, {"Q", 2}};
  auto c = pack(DenseTensor<std::int64_t>({2, 2, 2}), buf.index, b, buf.coords);
  EXPECT_EQ(c.length, 6);
  EXPECT_EQ(c.length, static_cast<std::int64_t>(oracle::points(buf.index.accessed, b).size()));
}

TEST(Unpack, DiagonalRoundTrip) {
  auto plan = suite::compile("SpMV_D").plan;
  const auto& buf = buffer_of(plan, "B");
  const Binding b{{"n_i", 4}, {"n_j", 4}};
  auto t = iota({4, 4});
  auto back = unpack(pack(t, buf.index, b, buf.coords), buf.index, nullptr, b, {4, 4}, buf.coords);
  for (std::int64_t i = 0; i < 4; ++i) {
    for (std::int64_t j = 0; j < 4; ++j) EXPECT_EQ(back.at({i, j}), i == j ? t.at({i, j}) : 0);
  }
}

TEST(Unpack, SymmetricFromLowerTriangle) {
  auto p = parse_program(kLower);
  auto plan = compile_rule(p, "A");
  const auto& buf = buffer_of(plan, "B");
  const Binding b{{"n", 5}};
  auto c = pack(iota({5, 5}), buf.index, b, buf.coords);
  auto v = unpack(c, buf.index, &p.redundancy_maps.at("B"), b, {5, 5}, buf.coords);
  for (std::int64_t x = 0; x < 5; ++x) {
    for (std::int64_t y = 0; y < 5; ++y) EXPECT_EQ(v.at({x, y}), v.at({y, x}));
  }
  EXPECT_EQ(v.at({1, 3}), iota({5, 5}).at({3, 1}));
}

TEST(Unpack, RedundancyImageOutsideDomainThrows) {
  auto p = parse_program(
      "A(i) := B(i, j) * C(j)\n"
      "B_U(i, j) := (0 <= i < n) * (i = j)\n"
      "B_R(i, j, i', j') := (i < j) * (i' = j) * (j' = i)\n"
      "C_U(j) := (0 <= j < n)\n");
  auto plan = compile_rule(p, "A");
  const auto& buf = buffer_of(plan, "B");
  const Binding b{{"n", 3}};
  auto c = pack(iota({3, 3}), buf.index, b, buf.coords);
  try {
    unpack(c, buf.index, &p.redundancy_maps.at("B"), b, {3, 3}, buf.coords);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(Unpack, EmptyBufferGivesZeros) {
  auto plan = suite::compile("SpMV_D").plan;
  const auto& buf = buffer_of(plan, "B");
  const Binding b{{"n_i", 0}, {"n_j", 3}};
  CompressedBuffer<double> empty;
  auto t = unpack(empty, buf.index, nullptr, b, {0, 3}, buf.coords);
  EXPECT_TRUE(t.data.empty());
  const Binding b2{{"n_i", 3}, {"n_j", 3}};
  CompressedBuffer<double> zeros{0, 3, {0, 0, 0}};
  auto z = unpack(zeros, buf.index, nullptr, b2, {3, 3}, buf.coords);
  for (double x : z.data) EXPECT_EQ(x, 0.0);
}

// pack writes each slot once; unpack(pack(t)) equals t on the accessed
// domain and zero elsewhere. Every compressed buffer of every builtin.
TEST(PackUnpack, RoundTripAndWriteOnceProperty) {
  for (const auto& name : suite::all_kernels()) {
    auto c = suite::compile(name);
    for (const auto& buf : c.plan.registry.buffers) {
      if (buf.dense) continue;
      const auto rank = buf.coords.size();
      for (std::int64_t n : {1, 3, rank <= 2 ? 16 : 7}) {
        const Binding b = resolve_binding(c.plan.params, {{"n", n}});
        auto shape = evaluate_shape(c.plan.shapes.at(buf.tensor), b);
        auto t = random_tensor<std::int64_t>(shape, static_cast<std::uint64_t>(n));
        std::vector<int> writes;
        auto packed = pack(t, buf.index, b, buf.coords, &writes);
        for (int w : writes) EXPECT_EQ(w, 1) << name << " " << buf.tensor;
        auto back = unpack(packed, buf.index, nullptr, b, shape, buf.coords);
        std::set<oracle::Point> in;
        for (auto& x : oracle::points(coordinate_domain(buf.index.accessed, buf.coords), b)) in.insert(x);
        for (std::int64_t k = 0; k < static_cast<std::int64_t>(t.data.size()); ++k) {
          oracle::Point x(shape.size());
          std::int64_t r = k;
          for (std::size_t d = shape.size(); d-- > 0;) {
            x[d] = r % shape[d];
            r /= shape[d];
          }
          EXPECT_EQ(back.data[static_cast<std::size_t>(k)], in.count(x) ? t.data[static_cast<std::size_t>(k)] : 0)
              << name << " " << buf.tensor;
        }
      }
    }
  }
}

TEST(Footprint, DiagonalInputRateIsN) {
  auto plan = suite::compile("SpMV_D").plan;
  for (std::int64_t n : {1, 7, 100}) {
    auto rep = footprint_report(plan, {{"n_i", n}, {"n_j", n}});
    EXPECT_EQ(rep.tensor("B").dense, n * n);
    EXPECT_EQ(rep.tensor("B").compressed, n);
    EXPECT_EQ(rep.tensor("B").rate(), Rational(n));
  }
}

TEST(Footprint, UpperTriangularAtTenThousand) {
  auto plan = suite::compile("SpMV_UT").plan;
  const std::int64_t n = 10000;
  auto rep = footprint_report(plan, {{"n_i", n}, {"n_j", n}});
  EXPECT_EQ(rep.tensor("B").compressed, 50005000);
  EXPECT_EQ(rep.tensor("B").compressed, fuse_piecewise(count_points(buffer_of(plan, "B").index.accessed))
                                            .evaluate({{"n_i", n}, {"n_j", n}}));
}

TEST(Footprint, MttDiagonalKeepsNOfNCubed) {
  auto plan = suite::compile("MTT_D").plan;
  const Binding b = resolve_binding(plan.params, {{"n", 9}});
  auto rep = footprint_report(plan, b);
  EXPECT_EQ(rep.tensor("B").dense, 729);
  EXPECT_EQ(rep.tensor("B").compressed, 9);
  EXPECT_EQ(rep.tensor("B").compressed,
            static_cast<std::int64_t>(oracle::points(buffer_of(plan, "B").index.accessed, b).size()));
}

TEST(Footprint, TotalsAndRateAtLeastOneProperty) {
  for (const auto& name : suite::evaluation_kernels()) {
    for (auto level : {Compression::None, Compression::Input, Compression::InputOutput}) {
      auto plan = suite::compile(name, level).plan;
      for (const auto& b : oracle::small_bindings(plan.params, 20, 19)) {
        auto rep = footprint_report(plan, b);
        std::int64_t total = 0;
        for (auto len : plan.buffer_lengths(b)) total += len;
        EXPECT_EQ(rep.compressed_total, total) << name;
        for (const auto& t : rep.tensors) EXPECT_LE(t.compressed, t.dense) << name << " " << t.tensor;
        EXPECT_GE(rep.rate(), Rational(1)) << name;
      }
    }
  }
}

TEST(TensorIo, RoundTripAndErrors) {
  auto t = random_tensor<double>({2, 3}, 4);
  std::stringstream ss;
  write_tensor(ss, t);
  EXPECT_EQ(ss.str().rfind("shape: 2 3", 0), 0u);
  auto back = read_tensor<double>(ss);
  EXPECT_EQ(back.shape, t.shape);
  EXPECT_EQ(back.data, t.data);
  std::stringstream bad("shape: 2 2\n1 2 3\n");
  EXPECT_THROW(read_tensor<double>(bad), Error);
  EXPECT_THROW(load_tensor<double>("/nonexistent/tensor.txt"), Error);
}

TEST(TensorIo, RandomValuesStayInRange) {
  auto i = random_tensor<std::int64_t>({50}, 1);
  auto d = random_tensor<double>({50}, 1);
  for (auto x : i.data) EXPECT_LE(std::abs(x), 9);
  for (auto x : d.data) EXPECT_LE(std::abs(x), 10.0);
  EXPECT_EQ(random_tensor<double>({50}, 1).data, d.data);
}

TEST(Compare, MaxRelativeError) {
  DenseTensor<double> a({2}), b({2});
  a.data = {1.0, 200.0};
  b.data = {1.0, 202.0};
  EXPECT_DOUBLE_EQ(max_relative_error(a, b), 2.0 / 202.0);
  DenseTensor<double> c({3});
  EXPECT_THROW(max_relative_error(a, c), Error);
}
