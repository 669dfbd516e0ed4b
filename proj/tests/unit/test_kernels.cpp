#include <gtest/gtest.h>

#include "polypack/error.hpp"
#include "polypack/kernels.hpp"
#include "polypack/stur.hpp"
#include "suite.hpp"

using namespace polypack;

TEST(Kernels, TwelveEvaluationKernels) {
  EXPECT_EQ(suite::evaluation_kernels(),
            (std::vector<std::string>{"TTM_DP", "TTM_J", "TTM_UT", "THP_DP", "THP_I", "THP_J", "MTT_D", "MTT_JUT",
                                      "MTT_J", "SpMV_L", "SpMV_UT", "SpMV_D"}));
  EXPECT_EQ(suite::all_kernels().size(), 16u);
}

TEST(Kernels, EverySourceParsesAndCompiles) {
  for (const auto& k : builtin_kernels()) {
    auto p = parse_program(k.source);
    EXPECT_EQ(p.rules.size(), 1u) << k.name;
    EXPECT_NO_THROW(compile_rule(p, "A")) << k.name;
  }
}

TEST(Kernels, UnknownNameThrows) {
  try {
    builtin_kernel("GEMM");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownIdentifier);
  }
}

TEST(Binding, PlainNFillsExtentsAndFixedIndices) {
  auto b = resolve_binding({"n_i", "N", "J", "k"}, {{"n", 10}});
  EXPECT_EQ(b.at("n_i"), 10);
  EXPECT_EQ(b.at("N"), 10);
  EXPECT_EQ(b.at("J"), 5);
  EXPECT_EQ(b.at("k"), 5);
  EXPECT_EQ(resolve_binding({"n_i"}, {{"n", 10}, {"n_i", 3}}).at("n_i"), 3);
  EXPECT_THROW(resolve_binding({"Z"}, {{"n", 4}}), Error);
}
