#pragma once

#include <map>
#include <string>
#include <vector>

#include "polypack/affine.hpp"
#include "polypack/polyhedron.hpp"

namespace polypack {

struct Access {
  std::string tensor;
  std::vector<std::string> indices;

  friend bool operator==(const Access&, const Access&) = default;
  std::string str() const;
};

/// One product term of a rule: output access, input factors and the
/// conjunction of structure constraints.
struct Summand {
  Access output;
  std::vector<Access> inputs;
  std::vector<Constraint> constraints;
  /// Iterators in first-appearance order (output iterators first).
  std::vector<std::string> iterators;
  /// Symbols in first-appearance order.
  std::vector<std::string> symbols;
  bool empty = false;

  friend bool operator==(const Summand&, const Summand&) = default;
  std::string str() const;
};

struct Rule {
  Access head;
  std::vector<Summand> summands;

  const std::string& name() const { return head.tensor; }
  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Symbolic set of a tensor's unique coordinates; alternatives are unioned.
struct UniqueSet {
  std::string tensor;
  std::vector<std::string> iters;
  std::vector<std::vector<Constraint>> alternatives;

  friend bool operator==(const UniqueSet&, const UniqueSet&) = default;
};

/// Maps each redundant coordinate in `domain` to its unique representative:
/// primed[k] = images[k] (affine over iters and symbols).
struct RedundancyMap {
  std::string tensor;
  std::vector<std::string> iters;
  std::vector<std::string> primed;
  std::vector<Constraint> domain;
  std::vector<AffineExpr> images;

  friend bool operator==(const RedundancyMap&, const RedundancyMap&) = default;
};

struct Program {
  std::vector<Rule> rules;
  std::map<std::string, UniqueSet> unique_sets;
  std::map<std::string, RedundancyMap> redundancy_maps;
  /// Declared tensor extents (`T_S := (e1, e2, ...)`).
  std::map<std::string, std::vector<AffineExpr>> shapes;

  const Rule& rule(const std::string& name) const;
  /// Every symbol mentioned anywhere, sorted.
  std::vector<std::string> symbols() const;

  friend bool operator==(const Program&, const Program&) = default;
};

/// Parses STUR source. Throws ParseError on malformed input.
Program parse_program(const std::string& text);

/// Source text that parses back to an equal Program.
std::string print_program(const Program& p);

/// Removes duplicate and constant-true constraints, drops comparisons that
/// the equalities make redundant and flags constant-false summands as empty.
Summand simplify_summand(Summand s);

/// The compressed-tensor summands of a rule: each summand conjoined with
/// the unique sets of its accesses (distributing over unique-set unions;
/// a tensor without a unique set adds no constraint),
/// then simplified. Empty combinations are dropped.
std::vector<Summand> build_compressed_summands(const Program& p, const std::string& rule);

/// Polyhedron over the summand's iterators with its symbols as params.
/// Throws ErrorKind::Unbounded for an iterator without finite bounds.
Polyhedron iteration_space(const Summand& s);

}  // namespace polypack
