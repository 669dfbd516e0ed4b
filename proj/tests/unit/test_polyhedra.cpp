#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "oracle.hpp"
#include "polypack/error.hpp"
#include "polypack/kernels.hpp"
#include "polypack/polyhedron.hpp"
#include "polypack/stur.hpp"
#include "suite.hpp"

using namespace polypack;

namespace {

AffineExpr v(const std::string& name) { return AffineExpr::var(name); }
Constraint range(const std::string& x, const AffineExpr& lo, const AffineExpr& hi_exclusive, bool upper) {
  return upper ? Constraint::ge(hi_exclusive - v(x) - Rational(1)) : Constraint::ge(v(x) - lo);
}

Polyhedron box(std::vector<std::string> dims, std::vector<std::string> params,
               std::vector<Constraint> cs) {
  Polyhedron p;
  p.dims = std::move(dims);
  p.params = std::move(params);
  p.constraints = std::move(cs);
  return p;
}

Polyhedron diagonal() {
  return box({"i", "j"}, {"n"},
             {range("i", Rational(0), v("n"), false), range("i", Rational(0), v("n"), true),
              Constraint::eq(v("i") - v("j"))});
}

Polyhedron lower_triangle() {
  return box({"i", "j"}, {"n"},
             {range("i", Rational(0), v("n"), false), range("i", Rational(0), v("n"), true),
              Constraint::ge(v("j")), Constraint::ge(v("i") - v("j"))});
}

std::vector<oracle::Point> project(const std::vector<oracle::Point>& pts, const std::vector<std::size_t>& keep) {
  std::set<oracle::Point> out;
  for (const auto& x : pts) {
    oracle::Point y;
    for (auto k : keep) y.push_back(x[k]);
    out.insert(y);
  }
  return {out.begin(), out.end()};
}

// Every iteration space of every builtin's compressed summands.
std::vector<std::pair<std::string, Polyhedron>> kernel_spaces() {
  std::vector<std::pair<std::string, Polyhedron>> out;
  for (const auto& name : suite::all_kernels()) {
    auto p = parse_program(builtin_kernel(name).source);
    for (const auto& s : build_compressed_summands(p, "A")) out.emplace_back(name, iteration_space(s));
  }
  return out;
}

}  // namespace

TEST(IterationSpace, UpperHalfCubeTtm) {
  auto p = parse_program(
      "A(i, j, k) := B(i, j, l) * C(k, l)\n"
      "B_U(i, j, l) := (0 <= i < M) * (i <= j < N) * (0 <= l < Q)\n"
      "C_U(k, l) := (0 <= k < P) * (0 <= l < Q)\n");
  auto d = iteration_space(build_compressed_summands(p, "A").at(0));
  EXPECT_EQ(d.dims, (std::vector<std::string>{"i", "j", "k", "l"}));
  std::vector<Constraint> expected{range("i", Rational(0), v("M"), false), range("i", Rational(0), v("M"), true),
                                   Constraint::ge(v("j") - v("i")), range("j", Rational(0), v("N"), true),
                                   range("k", Rational(0), v("P"), false), range("k", Rational(0), v("P"), true),
                                   range("l", Rational(0), v("Q"), false), range("l", Rational(0), v("Q"), true)};
  for (const auto& b : oracle::small_bindings({"M", "N", "P", "Q"}, 20, 1)) {
    EXPECT_EQ(oracle::points(d, b), oracle::box_points(d.dims, expected, b, -2, 10));
  }
}

TEST(IterationSpace, SpmvDiagonal) {
  auto p = parse_program(builtin_kernel("SpMV_D").source);
  auto d = iteration_space(build_compressed_summands(p, "A").at(0));
  EXPECT_EQ(d.dims, (std::vector<std::string>{"i", "j"}));
  EXPECT_EQ(enumerate(d, {{"n_i", 4}, {"n_j", 4}}).size(), 4u);
}

TEST(IterationSpace, ConstantFalseSummandIsEmpty) {
  Summand s;
  s.iterators = {"i"};
  s.constraints = {Constraint::ge(v("i")), Constraint::ge(AffineExpr(Rational(-1)))};
  s = simplify_summand(s);
  EXPECT_TRUE(iteration_space(s).empty);
}

TEST(IterationSpace, UnboundedIteratorThrows) {
  Summand s;
  s.iterators = {"i"};
  s.constraints = {Constraint::ge(v("i"))};
  try {
    iteration_space(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unbounded);
  }
}

TEST(Image, UpperHalfCubeB) {
  auto p = parse_program(
      "A(i, j, k) := B(i, j, l) * C(k, l)\n"
      "B_U(i, j, l) := (0 <= i < M) * (i <= j < N) * (0 <= l < Q)\n"
      "C_U(k, l) := (0 <= k < P) * (0 <= l < Q)\n");
  auto d = iteration_space(build_compressed_summands(p, "A").at(0));
  bool exact = false;
  auto b = image(d, AccessMap{{"i", "j", "l"}}, &exact);
  EXPECT_TRUE(exact);
  EXPECT_EQ(b.dims, (std::vector<std::string>{"i", "j", "l"}));
  std::vector<Constraint> expected{range("i", Rational(0), v("M"), false), range("i", Rational(0), v("M"), true),
                                   Constraint::ge(v("j") - v("i")), range("j", Rational(0), v("N"), true),
                                   range("l", Rational(0), v("Q"), false), range("l", Rational(0), v("Q"), true)};
  for (const auto& bind : oracle::small_bindings({"M", "N", "P", "Q"}, 20, 2)) {
    EXPECT_EQ(oracle::points(b, bind), oracle::box_points(b.dims, expected, bind, -2, 10));
  }
}

TEST(Image, IdentityMapKeepsPoints) {
  auto d = lower_triangle();
  auto same = image(d, AccessMap{{"i", "j"}});
  for (std::int64_t n = 1; n <= 8; ++n) EXPECT_EQ(oracle::points(same, {{"n", n}}), oracle::points(d, {{"n", n}}));
}

TEST(Image, DiagonalOntoSecondCoordinate) {
  auto j = image(diagonal(), AccessMap{{"j"}});
  EXPECT_EQ(j.dims, (std::vector<std::string>{"j"}));
  for (std::int64_t n = 1; n <= 8; ++n) {
    EXPECT_EQ(oracle::points(j, {{"n", n}}), project(oracle::points(diagonal(), {{"n", n}}), {1}));
  }
}

// FM exactness is checked, not assumed: every access of every builtin.
TEST(Image, MatchesProjectedEnumerationProperty) {
  for (const auto& name : suite::all_kernels()) {
    auto p = parse_program(builtin_kernel(name).source);
    for (const auto& s : build_compressed_summands(p, "A")) {
      auto d = iteration_space(s);
      std::vector<Access> accesses = s.inputs;
      accesses.push_back(s.output);
      for (const auto& a : accesses) {
        std::vector<std::string> selected;
        std::vector<std::size_t> keep;
        for (std::size_t k = 0; k < d.dims.size(); ++k) {
          if (std::find(a.indices.begin(), a.indices.end(), d.dims[k]) != a.indices.end()) {
            selected.push_back(d.dims[k]);
            keep.push_back(k);
          }
        }
        auto img = image(d, AccessMap{selected});
        for (const auto& b : oracle::small_bindings(d.params, 16, 4)) {
          EXPECT_EQ(oracle::points(img, b), project(oracle::points(d, b), keep)) << name << " " << a.str();
        }
      }
    }
  }
}

TEST(Slices, UpperHalfCubeHasThreeSlices) {
  auto b = box({"i", "j", "l"}, {"M", "N", "Q"},
               {range("i", Rational(0), v("M"), false), range("i", Rational(0), v("M"), true),
                Constraint::ge(v("j") - v("i")), range("j", Rational(0), v("N"), true),
                range("l", Rational(0), v("Q"), false), range("l", Rational(0), v("Q"), true)});
  auto slices = preceding_slices(b);
  ASSERT_EQ(slices.size(), 3u);
  for (const auto& s : slices) {
    EXPECT_EQ(s.dims, (std::vector<std::string>{"i'", "j'", "l'"}));
    EXPECT_EQ(s.outer, (std::vector<std::string>{"i", "j", "l"}));
  }
}

TEST(Slices, OneDimensionalSet) {
  auto line = box({"j"}, {"n"}, {range("j", Rational(0), v("n"), false), range("j", Rational(0), v("n"), true)});
  auto slices = preceding_slices(line);
  ASSERT_EQ(slices.size(), 1u);
  for (std::int64_t j = 0; j < 6; ++j) {
    EXPECT_EQ(oracle::points(slices[0], {{"n", 6}, {"j", j}}).size(), static_cast<std::size_t>(j));
  }
}

TEST(Slices, LowerTriangleUnionCountsPrecedingPoints) {
  auto slices = preceding_slices(lower_triangle());
  for (std::int64_t i = 0; i < 7; ++i) {
    for (std::int64_t j = 0; j <= i; ++j) {
      std::size_t total = 0;
      for (const auto& s : slices) total += oracle::points(s, {{"n", 7}, {"i", i}, {"j", j}}).size();
      EXPECT_EQ(total, static_cast<std::size_t>(i * (i + 1) / 2 + j));
    }
  }
}

// Slices are disjoint and their union is the set of lexicographically
// smaller accessed points, at every accessed point.
TEST(Slices, DisjointUnionOfPredecessorsProperty) {
  for (const auto& [name, d] : kernel_spaces()) {
    auto slices = preceding_slices(d);
    for (const auto& b : oracle::small_bindings(d.params, 6, 5)) {
      auto all = oracle::points(d, b);
      for (std::size_t at = 0; at < all.size(); at += 1 + all.size() / 12) {
        Binding ctx = oracle::with_point(b, d.dims, all[at]);
        std::multiset<oracle::Point> got;
        for (const auto& s : slices) {
          for (auto& x : oracle::points(s, ctx)) got.insert(x);
        }
        std::multiset<oracle::Point> want(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(at));
        EXPECT_EQ(got, want) << name;
      }
    }
  }
}

TEST(Enumerate, Examples) {
  EXPECT_EQ(enumerate(diagonal(), {{"n", 3}}), (std::vector<oracle::Point>{{0, 0}, {1, 1}, {2, 2}}));
  auto upper = box({"i", "j"}, {"n"},
                   {range("i", Rational(0), v("n"), false), Constraint::ge(v("j") - v("i")),
                    range("j", Rational(0), v("n"), true)});
  EXPECT_EQ(enumerate(upper, {{"n", 2}}), (std::vector<oracle::Point>{{0, 0}, {0, 1}, {1, 1}}));
  auto strided = box({"i", "j"}, {"N"},
                     {range("i", Rational(0), v("N"), false), range("i", Rational(0), v("N"), true),
                      range("j", Rational(0), v("N"), false), range("j", Rational(0), v("N"), true),
                      Constraint::mod_eq(v("j") - v("i"), v("N"), Rational(2))});
  EXPECT_EQ(enumerate(strided, {{"N", 4}}).size(), 4u);
}

TEST(Enumerate, StrictlyIncreasingAndEqualToOracleProperty) {
  for (const auto& [name, d] : kernel_spaces()) {
    for (const auto& b : oracle::small_bindings(d.params, 16, 6)) {
      auto pts = enumerate(d, b);
      EXPECT_TRUE(std::adjacent_find(pts.begin(), pts.end(), std::greater_equal<>()) == pts.end()) << name;
      EXPECT_EQ(pts, oracle::points(d, b)) << name;
      EXPECT_EQ(Enumerator(d).count(b), static_cast<std::int64_t>(pts.size()));
    }
  }
}

TEST(Emptiness, Examples) {
  EXPECT_EQ(is_empty(box({"i"}, {}, {Constraint::ge(v("i")), Constraint::ge(-v("i") - Rational(1))})),
            Emptiness::Empty);
  EXPECT_EQ(is_empty(box({"i"}, {"n"}, {range("i", Rational(0), v("n"), false), range("i", Rational(0), v("n"), true)})),
            Emptiness::NonEmpty);
  EXPECT_EQ(is_empty(box({"i", "j"}, {}, {Constraint::eq(v("i") - v("j")), Constraint::ge(v("j") - v("i") - Rational(1))})),
            Emptiness::Empty);
}

TEST(Subtract, DisjointPiecesCoverDifferenceProperty) {
  oracle::Gen g(9);
  const std::vector<std::string> dims{"i", "j"};
  for (int t = 0; t < 120; ++t) {
    std::vector<Constraint> base{range("i", Rational(0), v("n"), false), range("i", Rational(0), v("n"), true),
                                 range("j", Rational(0), v("n"), false), range("j", Rational(0), v("n"), true)};
    Polyhedron a = box(dims, {"n"}, base), b = box(dims, {"n"}, {});
    for (int k = 0; k < 2; ++k) a.constraints.push_back(Constraint::ge(g.affine({"i", "j", "n"}, 4)));
    for (int k = 0; k < 2; ++k) b.constraints.push_back(Constraint::ge(g.affine({"i", "j", "n"}, 4)));
    if (g.coin()) b.constraints.push_back(Constraint::eq(g.affine({"i", "j"}, 2)));
    auto pieces = subtract(a, b);
    for (std::int64_t n = 1; n <= 6; ++n) {
      std::set<oracle::Point> want;
      auto in_b = oracle::box_points(dims, b.constraints, {{"n", n}}, -1, n + 1);
      for (auto& x : oracle::points(a, {{"n", n}})) {
        if (!std::binary_search(in_b.begin(), in_b.end(), x)) want.insert(x);
      }
      std::multiset<oracle::Point> got;
      for (const auto& p : pieces) {
        for (auto& x : oracle::points(p, {{"n", n}})) got.insert(x);
      }
      EXPECT_EQ(got, std::multiset<oracle::Point>(want.begin(), want.end()));
    }
  }
}

TEST(ExpandMod, StridedDiagonalAlternativesPartitionTheSet) {
  auto strided = box({"i", "j"}, {"N"},
                     {range("i", Rational(0), v("N"), false), range("i", Rational(0), v("N"), true),
                      range("j", Rational(0), v("N"), false), range("j", Rational(0), v("N"), true),
                      Constraint::mod_eq(v("j") - v("i"), v("N"), Rational(1))});
  auto alts = expand_mod(strided.constraints, {"N"});
  ASSERT_TRUE(alts.has_value());
  for (std::int64_t n = 1; n <= 8; ++n) {
    std::multiset<oracle::Point> got;
    for (const auto& alt : *alts) {
      for (auto& x : oracle::box_points({"i", "j"}, alt, {{"N", n}}, -1, n + 1)) got.insert(x);
    }
    auto want = oracle::points(strided, {{"N", n}});
    EXPECT_EQ(got, std::multiset<oracle::Point>(want.begin(), want.end())) << n;
  }
}

TEST(DimBounds, TriangleBoundsAreAffine) {
  auto bounds = dim_bounds(lower_triangle());
  ASSERT_EQ(bounds.size(), 2u);
  EXPECT_FALSE(bounds[1].lower.empty());
  EXPECT_FALSE(bounds[1].upper.empty());
}
