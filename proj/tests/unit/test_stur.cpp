#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "oracle.hpp"
#include "polypack/error.hpp"
#include "polypack/kernels.hpp"
#include "polypack/stur.hpp"
#include "suite.hpp"

using namespace polypack;

namespace {

AffineExpr v(const std::string& name) { return AffineExpr::var(name); }

std::set<Constraint> normalized(std::vector<Constraint> cs) {
  std::set<Constraint> out;
  for (auto& c : cs) {
    normalize(c);
    out.insert(c);
  }
  return out;
}

std::vector<std::string> names_of(const Summand& s) {
  std::vector<std::string> out = s.iterators;
  return out;
}

}  // namespace

TEST(Parse, SpmvDiagonalUniqueSet) {
  auto p = parse_program("A(i) := B(i, j) * C(j)\nB_U(i, j) := (0 <= i < n_i) * (i = j)\n");
  ASSERT_EQ(p.rules.size(), 1u);
  ASSERT_EQ(p.rules[0].summands.size(), 1u);
  const auto& alts = p.unique_sets.at("B").alternatives;
  ASSERT_EQ(alts.size(), 1u);
  EXPECT_EQ(normalized(alts[0]),
            normalized({Constraint::ge(v("i")), Constraint::ge(v("n_i") - v("i") - Rational(1)),
                        Constraint::eq(v("i") - v("j"))}));
}

TEST(Parse, EmptySourceHasNoRules) {
  auto p = parse_program("");
  EXPECT_TRUE(p.rules.empty());
  EXPECT_TRUE(p.unique_sets.empty());
}

TEST(Parse, ModuloComparison) {
  auto p = parse_program("B_U(i, j) := (0 <= i < N) * (0 <= j < N) * ((j - i) % N = s)\n");
  const auto& cs = p.unique_sets.at("B").alternatives.at(0);
  auto it = std::find_if(cs.begin(), cs.end(),
                         [](const Constraint& c) { return c.kind == ConstraintKind::ModEq; });
  ASSERT_NE(it, cs.end());
  EXPECT_EQ(it->expr, v("j") - v("i"));
  EXPECT_EQ(it->modulus, v("N"));
  EXPECT_EQ(it->residue, v("s"));
}

TEST(Parse, MalformedSourceReportsPosition) {
  try {
    parse_program("A(i) := B(i, j * C(j)\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Syntax);
    EXPECT_EQ(e.line(), 1);
    EXPECT_GT(e.column(), 0);
  }
  EXPECT_THROW(parse_program("A(i) := B(i) * (i * i >= 0)\n"), Error);
}

TEST(Parse, IteratorOrderIsFirstAppearance) {
  auto p = parse_program("A(i, k) := B(k, j) * C(j, i) * (m >= j)\n");
  const auto& s = p.rules[0].summands[0];
  EXPECT_EQ(names_of(s), (std::vector<std::string>{"i", "k", "j"}));
  EXPECT_EQ(s.symbols, (std::vector<std::string>{"m"}));
}

TEST(Simplify, RemovesDuplicates) {
  Summand s;
  s.iterators = {"i", "j"};
  s.symbols = {"n"};
  s.constraints = {Constraint::ge(v("i")), Constraint::ge(v("i")), Constraint::eq(v("i") - v("j")),
                   Constraint::ge(v("n") - v("j") - Rational(1))};
  auto out = simplify_summand(s);
  EXPECT_EQ(out.constraints.size(), 3u);
  EXPECT_EQ(normalized(out.constraints), normalized({s.constraints[0], s.constraints[2], s.constraints[3]}));
}

TEST(Simplify, DropsImpliedComparison) {
  Summand s;
  s.iterators = {"i", "j"};
  s.constraints = {Constraint::eq(v("i") - v("j")), Constraint::ge(v("i")), Constraint::ge(v("j"))};
  auto out = simplify_summand(s);
  EXPECT_EQ(out.constraints.size(), 2u);
  for (std::int64_t n = 1; n <= 8; ++n) {
    EXPECT_EQ(oracle::box_points({"i", "j"}, out.constraints, {}, -4, n),
              oracle::box_points({"i", "j"}, s.constraints, {}, -4, n));
  }
}

TEST(Simplify, DropsConstantTrueAndFlagsConstantFalse) {
  Summand s;
  s.iterators = {"i"};
  s.constraints = {Constraint::ge(AffineExpr(Rational(1))), Constraint::ge(v("n") - v("i") - Rational(1)),
                   Constraint::ge(v("i"))};
  auto out = simplify_summand(s);
  EXPECT_EQ(out.constraints.size(), 2u);
  EXPECT_FALSE(out.empty);
  s.constraints.push_back(Constraint::ge(AffineExpr(Rational(-1))));
  EXPECT_TRUE(simplify_summand(s).empty);
}

// Random conjunctions over i, j, k and n: the integer solution set is kept.
TEST(Simplify, PreservesSolutionSetProperty) {
  oracle::Gen g(11);
  const std::vector<std::string> dims{"i", "j", "k"};
  for (int t = 0; t < 150; ++t) {
    Summand s;
    s.iterators = dims;
    s.symbols = {"n"};
    for (const auto& d : dims) {
      s.constraints.push_back(Constraint::ge(v(d)));
      s.constraints.push_back(Constraint::ge(v("n") - v(d) - Rational(1)));
    }
    const int extra = static_cast<int>(g.integer(1, 4));
    for (int e = 0; e < extra; ++e) {
      AffineExpr a = g.affine({"i", "j", "k", "n"}, 3);
      const auto kind = g.integer(0, 5);
      if (kind == 0) {
        s.constraints.push_back(Constraint::eq(a));
      } else if (kind == 1) {
        s.constraints.push_back(Constraint::mod_eq(a, AffineExpr(Rational(g.integer(2, 3))),
                                                   AffineExpr(Rational(g.integer(0, 1)))));
      } else {
        s.constraints.push_back(Constraint::ge(a));
      }
      if (g.coin()) s.constraints.push_back(s.constraints[static_cast<std::size_t>(g.integer(0, 5))]);
    }
    auto out = simplify_summand(s);
    for (std::int64_t n = 1; n <= 8; ++n) {
      auto before = oracle::box_points(dims, s.constraints, {{"n", n}}, -1, n + 1);
      if (out.empty) {
        EXPECT_TRUE(before.empty()) << s.str();
        continue;
      }
      EXPECT_EQ(oracle::box_points(dims, out.constraints, {{"n", n}}, -1, n + 1), before) << s.str();
    }
  }
}

// Random well-formed sources: parse(print(p)) == p.
TEST(Print, RoundTripProperty) {
  oracle::Gen g(5);
  const std::vector<std::string> iters{"i", "j", "k", "l"};
  const std::vector<std::string> syms{"n", "M", "n_i", "s"};
  auto access = [&](const std::string& t, int arity) {
    std::vector<std::string> pool = iters;
    std::shuffle(pool.begin(), pool.end(), g.engine());
    std::string out = t + "(";
    for (int a = 0; a < arity; ++a) out += (a ? ", " : "") + pool[static_cast<std::size_t>(a)];
    return out + ")";
  };
  auto comparison = [&]() {
    const std::string lhs = g.pick(iters);
    switch (g.integer(0, 4)) {
      case 0: return "(0 <= " + lhs + " < " + g.pick(syms) + ")";
      case 1: return "(" + lhs + " = " + g.pick(iters) + " + " + std::to_string(g.integer(0, 3)) + ")";
      case 2: return "(" + std::to_string(g.integer(1, 3)) + "*" + lhs + " - " + g.pick(iters) + " >= " +
                     g.pick(syms) + ")";
      case 3: return "((" + lhs + " - " + g.pick(iters) + ") % " + g.pick(syms) + " = " +
                     std::to_string(g.integer(0, 2)) + ")";
      default: return "(" + lhs + " < " + g.pick(syms) + " - 1)";
    }
  };
  for (int t = 0; t < 200; ++t) {
    std::string src = access("A", static_cast<int>(g.integer(1, 2))) + " := ";
    const int summands = static_cast<int>(g.integer(1, 3));
    for (int s = 0; s < summands; ++s) {
      if (s) src += " + ";
      src += access("B", 2) + " * " + access("C", 1);
      for (int c = 0; c < g.integer(0, 3); ++c) src += " * " + comparison();
    }
    src += "\nB_U(i, j) := " + comparison() + " * " + comparison();
    if (g.coin()) src += " + " + comparison();
    src += "\n";
    if (g.coin()) src += "B_R(i, j, i', j') := (i < j) * (i' = j) * (j' = i)\n";
    if (g.coin()) src += "C_S := (" + g.pick(syms) + ")\n";
    Program p = parse_program(src);
    const std::string printed = print_program(p);
    EXPECT_EQ(parse_program(printed), p) << src << "\n--\n" << printed;
  }
}

TEST(Compress, DiagonalHadamard) {
  auto p = parse_program(
      "T(x, y) := M(x, y) * V(x, y)\n"
      "M_U(x, y) := (0 <= x < n) * (x = y)\n"
      "V_U(x, y) := (0 <= y <= x) * (x < n)\n"
      "V_R(x, y, x', y') := (x < y) * (x' = y) * (y' = x)\n");
  auto s = build_compressed_summands(p, "T");
  ASSERT_EQ(s.size(), 1u);
  const std::vector<Constraint> expected{Constraint::ge(v("x")), Constraint::ge(v("n") - v("x") - Rational(1)),
                                         Constraint::ge(v("y")), Constraint::ge(v("n") - v("y") - Rational(1)),
                                         Constraint::eq(v("x") - v("y"))};
  for (std::int64_t n = 1; n <= 8; ++n) {
    EXPECT_EQ(oracle::box_points({"x", "y"}, s[0].constraints, {{"n", n}}, -2, n + 2),
              oracle::box_points({"x", "y"}, expected, {{"n", n}}, -2, n + 2));
  }
}

TEST(Compress, UpperHalfCubeTtm) {
  auto p = parse_program(
      "A(i, j, k) := B(i, j, l) * C(k, l)\n"
      "B_U(i, j, l) := (0 <= i < M) * (i <= j < N) * (0 <= l < Q)\n"
      "C_U(k, l) := (0 <= k < P) * (0 <= l < Q)\n");
  auto s = build_compressed_summands(p, "A");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].iterators, (std::vector<std::string>{"i", "j", "k", "l"}));
  EXPECT_EQ(normalized(s[0].constraints),
            normalized({Constraint::ge(v("l")), Constraint::ge(v("Q") - v("l") - Rational(1)),
                        Constraint::ge(v("j") - v("i")), Constraint::ge(v("N") - v("j") - Rational(1)),
                        Constraint::ge(v("i")), Constraint::ge(v("M") - v("i") - Rational(1)),
                        Constraint::ge(v("k")), Constraint::ge(v("P") - v("k") - Rational(1))}));
}

TEST(Compress, LeslieSplitsIntoTwoSummands) {
  auto p = parse_program(builtin_kernel("SpMV_L").source);
  auto s = build_compressed_summands(p, "A");
  ASSERT_EQ(s.size(), 2u);
  const Binding b{{"n_i", 6}, {"n_j", 6}};
  EXPECT_EQ(oracle::box_points({"i", "j"}, s[0].constraints, b, -2, 8).size(), 6u);
  EXPECT_EQ(oracle::box_points({"i", "j"}, s[1].constraints, b, -2, 8).size(), 5u);
}

// Compressed summands are exactly the rule points inside every accessed
// tensor's unique set.
TEST(Compress, ImpliesRuleAndUniqueSetsProperty) {
  for (const auto& name : suite::all_kernels()) {
    auto p = parse_program(builtin_kernel(name).source);
    const auto& rule = p.rule("A");
    auto compressed = build_compressed_summands(p, "A");
    for (const auto& b : oracle::small_bindings(p.symbols(), 12, 3)) {
      std::set<oracle::Point> got, want;
      const auto& iters = rule.summands[0].iterators;
      for (const auto& s : compressed) {
        ASSERT_EQ(s.iterators, iters);
        for (auto& x : oracle::box_points(iters, s.constraints, b, -1, oracle::max_value(b) + 1)) {
          EXPECT_TRUE(got.insert(x).second) << name << ": compressed summands overlap";
        }
      }
      for (const auto& s : rule.summands) {
        for (auto& x : oracle::box_points(iters, s.constraints, b, -1, oracle::max_value(b) + 1)) {
          Binding at = oracle::with_point(b, iters, x);
          bool in = true;
          std::vector<Access> accesses = s.inputs;
          accesses.push_back(s.output);
          for (const auto& a : accesses) {
            auto u = p.unique_sets.find(a.tensor);
            if (u == p.unique_sets.end()) continue;
            Binding ub = b;
            for (std::size_t q = 0; q < a.indices.size(); ++q) ub[u->second.iters[q]] = at.at(a.indices[q]);
            bool any = false;
            for (const auto& alt : u->second.alternatives) {
              any = any || std::all_of(alt.begin(), alt.end(), [&](const Constraint& c) { return c.holds(ub); });
            }
            in = in && any;
          }
          if (in) want.insert(x);
        }
      }
      EXPECT_EQ(got, want) << name;
    }
  }
}
