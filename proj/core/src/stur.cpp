#include "polypack/stur.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <sstream>

#include "polypack/error.hpp"

namespace polypack {

namespace {

enum class Tok {
  Name, Int, LParen, RParen, Comma, Plus, Minus, Star, Percent,
  Lt, Le, Eq, Gt, Ge, Assign, Colon, Sep, End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Name: return "identifier";
    case Tok::Int: return "integer";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Percent: return "'%'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Eq: return "'='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Assign: return "':='";
    case Tok::Colon: return "':'";
    case Tok::Sep: return "end of statement";
    case Tok::End: return "end of input";
  }
  return "token";
}

// Newlines end a statement unless a parenthesis is open or the line ends
// with an operator.
bool continues_line(Tok last) {
  switch (last) {
    case Tok::Plus: case Tok::Minus: case Tok::Star: case Tok::Percent: case Tok::Lt:
    case Tok::Le: case Tok::Eq: case Tok::Gt: case Tok::Ge: case Tok::Assign:
    case Tok::Colon: case Tok::Comma: case Tok::LParen: case Tok::Sep:
      return true;
    default:
      return false;
  }
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1, depth = 0;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string text, int c) { out.push_back({k, std::move(text), line, c}); };
  while (i < src.size()) {
    char ch = src[i];
    if (ch == '\n') {
      if (depth == 0 && !out.empty() && !continues_line(out.back().kind)) push(Tok::Sep, "", col);
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      ++col;
      continue;
    }
    if (ch == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    const int start = col;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      while (j < src.size() && src[j] == '\'') ++j;
      push(Tok::Name, src.substr(i, j - i), start);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      push(Tok::Int, src.substr(i, j - i), start);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    auto two = [&](char next) { return i + 1 < src.size() && src[i + 1] == next; };
    Tok k;
    int len = 1;
    switch (ch) {
      case '(': k = Tok::LParen; ++depth; break;
      case ')': k = Tok::RParen; depth = std::max(0, depth - 1); break;
      case ',': k = Tok::Comma; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '%': k = Tok::Percent; break;
      case ';': k = Tok::Sep; break;
      case '=': k = Tok::Eq; break;
      case '<': k = two('=') ? (len = 2, Tok::Le) : Tok::Lt; break;
      case '>': k = two('=') ? (len = 2, Tok::Ge) : Tok::Gt; break;
      case ':': k = two('=') ? (len = 2, Tok::Assign) : Tok::Colon; break;
      default:
        throw ParseError(ErrorKind::Syntax, std::string("unexpected character '") + ch + "'",
                         line, start);
    }
    push(k, src.substr(i, static_cast<std::size_t>(len)), start);
    i += static_cast<std::size_t>(len);
    col += len;
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

bool is_primed(const std::string& name) { return !name.empty() && name.back() == '\''; }

std::vector<std::string> constraint_names_in_order(const Constraint& c) {
  std::vector<std::string> out;
  for (const auto* e : {&c.expr, &c.modulus, &c.residue}) {
    for (const auto& [v, k] : e->coeffs()) out.push_back(v);
  }
  return out;
}

struct Factor {
  std::optional<Access> access;
  std::vector<Constraint> constraints;
};

using Term = std::vector<Factor>;

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  Program run() {
    Program prog;
    std::vector<std::string> inferred;  // unique sets without an iterator list
    while (true) {
      while (peek().kind == Tok::Sep) ++pos_;
      if (peek().kind == Tok::End) break;
      statement(prog, inferred);
      if (peek().kind != Tok::Sep && peek().kind != Tok::End) {
        fail(std::string("expected end of statement, found ") + describe(peek().kind));
      }
    }
    for (const auto& tensor : inferred) infer_iters(prog, tensor);
    return prog;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(const std::string& msg, ErrorKind kind = ErrorKind::Syntax) const {
    throw ParseError(kind, msg, peek().line, peek().column);
  }
  [[noreturn]] void fail_at(const Token& t, const std::string& msg, ErrorKind kind) const {
    throw ParseError(kind, msg, t.line, t.column);
  }

  const Token& expect(Tok k) {
    if (peek().kind != k) {
      fail(std::string("expected ") + describe(k) + ", found " +
           (peek().text.empty() ? describe(peek().kind) : "'" + peek().text + "'"));
    }
    return next();
  }

  std::vector<std::string> name_list() {
    expect(Tok::LParen);
    std::vector<std::string> names;
    if (peek().kind != Tok::RParen) {
      while (true) {
        const Token& t = expect(Tok::Name);
        if (std::find(names.begin(), names.end(), t.text) != names.end()) {
          fail_at(t, "repeated iterator '" + t.text + "' in one access", ErrorKind::Arity);
        }
        names.push_back(t.text);
        if (peek().kind != Tok::Comma) break;
        ++pos_;
      }
    }
    expect(Tok::RParen);
    return names;
  }

  void statement(Program& prog, std::vector<std::string>& inferred) {
    const Token& head = expect(Tok::Name);
    std::string name = head.text;
    char suffix = 0;
    if (name.size() > 2 && name[name.size() - 2] == '_' &&
        (name.back() == 'U' || name.back() == 'R' || name.back() == 'S')) {
      suffix = name.back();
      name.resize(name.size() - 2);
    }
    std::optional<std::vector<std::string>> iters;
    if (peek().kind == Tok::LParen && suffix != 'S') iters = name_list();
    if (peek().kind != Tok::Assign && peek().kind != Tok::Colon && peek().kind != Tok::Eq) {
      fail("expected ':=' after '" + head.text + "'");
    }
    ++pos_;

    switch (suffix) {
      case 'U': {
        UniqueSet us;
        us.tensor = name;
        if (iters) {
          us.iters = *iters;
        } else {
          inferred.push_back(name);
        }
        for (auto& term : terms(false)) {
          std::vector<Constraint> alt;
          for (auto& f : term) {
            for (auto& c : f.constraints) {
              for (const auto& v : c.vars()) {
                if (is_primed(v)) fail_at(head, "unknown identifier '" + v + "'",
                                          ErrorKind::UnknownIdentifier);
              }
              if (normalize(c) != Truth::True) alt.push_back(c);
            }
          }
          us.alternatives.push_back(std::move(alt));
        }
        prog.unique_sets[name] = std::move(us);
        return;
      }
      case 'R': {
        if (!iters) fail_at(head, "redundancy map needs an iterator list", ErrorKind::Syntax);
        prog.redundancy_maps[name] = redmap(head, name, *iters);
        return;
      }
      case 'S': {
        expect(Tok::LParen);
        std::vector<AffineExpr> extents;
        while (true) {
          extents.push_back(affine());
          if (peek().kind != Tok::Comma) break;
          ++pos_;
        }
        expect(Tok::RParen);
        prog.shapes[name] = std::move(extents);
        return;
      }
      default:
        break;
    }
    if (!iters) fail_at(head, "rule head needs an iterator list", ErrorKind::Syntax);
    Rule rule;
    rule.head = {name, *iters};
    auto ts = terms(true);
    // Iterator order: first appearance among the rule's accesses.
    std::vector<std::string> order = rule.head.indices;
    for (const auto& t : ts) {
      for (const auto& f : t) {
        if (!f.access) continue;
        for (const auto& idx : f.access->indices) {
          if (std::find(order.begin(), order.end(), idx) == order.end()) order.push_back(idx);
        }
      }
    }
    for (auto& t : ts) {
      Summand s;
      s.output = rule.head;
      std::set<std::string> used(rule.head.indices.begin(), rule.head.indices.end());
      for (auto& f : t) {
        if (f.access) {
          used.insert(f.access->indices.begin(), f.access->indices.end());
          s.inputs.push_back(std::move(*f.access));
        }
        for (auto& c : f.constraints) {
          for (const auto& v : c.vars()) {
            if (is_primed(v)) fail_at(head, "unknown identifier '" + v + "'",
                                      ErrorKind::UnknownIdentifier);
          }
          normalize(c);
          s.constraints.push_back(std::move(c));
        }
      }
      for (const auto& v : order) {
        if (used.count(v)) s.iterators.push_back(v);
      }
      for (const auto& c : s.constraints) {
        for (const auto& v : constraint_names_in_order(c)) {
          if (!used.count(v) &&
              std::find(s.symbols.begin(), s.symbols.end(), v) == s.symbols.end()) {
            s.symbols.push_back(v);
          }
        }
      }
      rule.summands.push_back(std::move(s));
    }
    prog.rules.push_back(std::move(rule));
  }

  RedundancyMap redmap(const Token& head, const std::string& tensor,
                       const std::vector<std::string>& names) {
    RedundancyMap r;
    r.tensor = tensor;
    for (const auto& n : names) (is_primed(n) ? r.primed : r.iters).push_back(n);
    std::vector<std::optional<AffineExpr>> images(r.primed.size());
    auto ts = terms(false);
    if (ts.size() != 1) fail_at(head, "redundancy map must be a single product", ErrorKind::Syntax);
    for (auto& f : ts.front()) {
      for (auto& c : f.constraints) {
        std::vector<std::string> primes;
        for (const auto& v : c.vars()) {
          if (!is_primed(v)) continue;
          if (std::find(r.primed.begin(), r.primed.end(), v) == r.primed.end()) {
            fail_at(head, "unknown identifier '" + v + "'", ErrorKind::UnknownIdentifier);
          }
          primes.push_back(v);
        }
        if (primes.empty()) {
          if (normalize(c) != Truth::True) r.domain.push_back(c);
          continue;
        }
        const std::string& p = primes.front();
        if (primes.size() != 1 || c.kind != ConstraintKind::Eq ||
            c.expr.coeff(p).abs() != Rational(1)) {
          fail_at(head, "redundancy map constraint " + c.str() + " must define one primed coordinate",
                  ErrorKind::NonAffine);
        }
        AffineExpr rest = c.expr;
        Rational a = c.expr.coeff(p);
        rest.set_coeff(p, 0);
        auto k = static_cast<std::size_t>(
            std::find(r.primed.begin(), r.primed.end(), p) - r.primed.begin());
        images[k] = rest * (Rational(-1) / a);
      }
    }
    for (std::size_t k = 0; k < images.size(); ++k) {
      if (!images[k]) {
        fail_at(head, "redundancy map leaves '" + r.primed[k] + "' undefined", ErrorKind::Syntax);
      }
      r.images.push_back(*images[k]);
    }
    return r;
  }

  std::vector<Term> terms(bool allow_access) {
    std::vector<Term> out;
    while (true) {
      Term t;
      while (true) {
        t.push_back(factor(allow_access));
        if (peek().kind != Tok::Star) break;
        ++pos_;
      }
      out.push_back(std::move(t));
      if (peek().kind != Tok::Plus) break;
      ++pos_;
    }
    return out;
  }

  Factor factor(bool allow_access) {
    Factor f;
    if (peek().kind == Tok::Name && peek(1).kind == Tok::LParen) {
      const Token& t = peek();
      if (!allow_access) fail("tensor access '" + t.text + "' not allowed here");
      ++pos_;
      f.access = Access{t.text, name_list()};
      return f;
    }
    expect(Tok::LParen);
    AffineExpr first = affine();
    if (peek().kind == Tok::Percent) {
      ++pos_;
      AffineExpr m = modulus_atom();
      expect(Tok::Eq);
      AffineExpr r = modulus_atom();
      f.constraints.push_back(Constraint::mod_eq(std::move(first), std::move(m), std::move(r)));
      expect(Tok::RParen);
      return f;
    }
    AffineExpr lhs = first;
    bool any = false;
    while (true) {
      Tok rel = peek().kind;
      if (rel != Tok::Lt && rel != Tok::Le && rel != Tok::Eq && rel != Tok::Gt && rel != Tok::Ge) {
        break;
      }
      ++pos_;
      AffineExpr rhs = affine();
      f.constraints.push_back(compare(lhs, rel, rhs));
      lhs = std::move(rhs);
      any = true;
    }
    if (!any) fail("expected a comparison");
    expect(Tok::RParen);
    return f;
  }

  AffineExpr modulus_atom() {
    if (peek().kind == Tok::Int) return AffineExpr(Rational(integer(next())));
    if (peek().kind == Tok::Name) return AffineExpr::var(next().text);
    fail("expected an integer or symbol in mod constraint");
  }

  static Constraint compare(const AffineExpr& a, Tok rel, const AffineExpr& b) {
    const AffineExpr one(Rational(1));
    switch (rel) {
      case Tok::Lt: return Constraint::ge(b - a - one);
      case Tok::Le: return Constraint::ge(b - a);
      case Tok::Gt: return Constraint::ge(a - b - one);
      case Tok::Ge: return Constraint::ge(a - b);
      default: return Constraint::eq(a - b);
    }
  }

  std::int64_t integer(const Token& t) const {
    try {
      return std::stoll(t.text);
    } catch (const std::exception&) {
      fail_at(t, "integer literal out of range", ErrorKind::Syntax);
    }
  }

  AffineExpr affine() {
    AffineExpr e;
    bool negate = false;
    if (peek().kind == Tok::Minus) {
      ++pos_;
      negate = true;
    } else if (peek().kind == Tok::Plus) {
      ++pos_;
    }
    e = product();
    if (negate) e = -e;
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      bool minus = next().kind == Tok::Minus;
      AffineExpr t = product();
      e = minus ? e - t : e + t;
    }
    return e;
  }

  AffineExpr product() {
    const Token& start = peek();
    AffineExpr e = atom();
    while (peek().kind == Tok::Star) {
      ++pos_;
      AffineExpr r = atom();
      if (!e.is_constant() && !r.is_constant()) {
        fail_at(start, "non-affine term '" + e.str() + "*" + r.str() + "'", ErrorKind::NonAffine);
      }
      e = e.is_constant() ? r * e.constant() : e * r.constant();
    }
    return e;
  }

  AffineExpr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: ++pos_; return AffineExpr(Rational(integer(t)));
      case Tok::Name:
        if (peek(1).kind == Tok::LParen) {
          fail("tensor access '" + t.text + "' inside an affine expression", ErrorKind::NonAffine);
        }
        ++pos_;
        return AffineExpr::var(t.text);
      case Tok::Minus: ++pos_; return -atom();
      case Tok::LParen: {
        ++pos_;
        AffineExpr e = affine();
        expect(Tok::RParen);
        return e;
      }
      default:
        fail(std::string("expected an affine expression, found ") + describe(t.kind));
    }
  }

  void infer_iters(Program& prog, const std::string& tensor) {
    for (const auto& r : prog.rules) {
      std::vector<const Access*> accesses{&r.head};
      for (const auto& s : r.summands) {
        for (const auto& a : s.inputs) accesses.push_back(&a);
      }
      for (const auto* a : accesses) {
        if (a->tensor != tensor) continue;
        prog.unique_sets[tensor].iters = a->indices;
        return;
      }
    }
    throw ParseError(ErrorKind::UnknownIdentifier,
                     "unique set for '" + tensor + "' has no iterator list and '" + tensor +
                         "' is never accessed",
                     1, 1);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string constraint_text(const Constraint& c) {
  switch (c.kind) {
    case ConstraintKind::Ge: return "(" + c.expr.str() + " >= 0)";
    case ConstraintKind::Eq: return "(" + c.expr.str() + " = 0)";
    case ConstraintKind::ModEq:
      return "((" + c.expr.str() + ") % " + c.modulus.str() + " = " + c.residue.str() + ")";
  }
  return {};
}

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

std::string product_text(const std::vector<Access>& accesses, const std::vector<Constraint>& cs) {
  std::vector<std::string> parts;
  for (const auto& a : accesses) parts.push_back(a.str());
  for (const auto& c : cs) parts.push_back(constraint_text(c));
  if (parts.empty()) parts.push_back("(0 >= 0)");
  return join(parts, " * ");
}

}  // namespace

std::string Access::str() const { return tensor + "(" + join(indices, ", ") + ")"; }

std::string Summand::str() const {
  return output.str() + " := " + product_text(inputs, constraints);
}

const Rule& Program::rule(const std::string& name) const {
  for (const auto& r : rules) {
    if (r.name() == name) return r;
  }
  throw Error(ErrorKind::UnknownIdentifier, "no rule named '" + name + "'");
}

std::vector<std::string> Program::symbols() const {
  std::set<std::string> out;
  for (const auto& r : rules) {
    for (const auto& s : r.summands) out.insert(s.symbols.begin(), s.symbols.end());
  }
  auto collect = [&](const std::vector<Constraint>& cs, const std::vector<std::string>& iters) {
    for (const auto& c : cs) {
      for (const auto& v : c.vars()) {
        if (std::find(iters.begin(), iters.end(), v) == iters.end() && !is_primed(v)) {
          out.insert(v);
        }
      }
    }
  };
  for (const auto& [name, us] : unique_sets) {
    for (const auto& alt : us.alternatives) collect(alt, us.iters);
  }
  for (const auto& [name, rm] : redundancy_maps) {
    collect(rm.domain, rm.iters);
    for (const auto& img : rm.images) {
      for (const auto& v : img.vars()) {
        if (std::find(rm.iters.begin(), rm.iters.end(), v) == rm.iters.end()) out.insert(v);
      }
    }
  }
  for (const auto& [name, extents] : shapes) {
    for (const auto& e : extents) {
      for (const auto& v : e.vars()) out.insert(v);
    }
  }
  return {out.begin(), out.end()};
}

Program parse_program(const std::string& text) { return Parser(text).run(); }

std::string print_program(const Program& p) {
  std::ostringstream os;
  for (const auto& r : p.rules) {
    std::vector<std::string> terms;
    for (const auto& s : r.summands) terms.push_back(product_text(s.inputs, s.constraints));
    os << r.head.str() << " := " << join(terms, " + ") << "\n";
  }
  for (const auto& [name, us] : p.unique_sets) {
    std::vector<std::string> terms;
    for (const auto& alt : us.alternatives) terms.push_back(product_text({}, alt));
    os << name << "_U(" << join(us.iters, ", ") << ") := " << join(terms, " + ") << "\n";
  }
  for (const auto& [name, rm] : p.redundancy_maps) {
    std::vector<std::string> names = rm.iters;
    names.insert(names.end(), rm.primed.begin(), rm.primed.end());
    std::vector<Constraint> cs;
    for (std::size_t k = 0; k < rm.primed.size(); ++k) {
      cs.push_back(Constraint::eq(AffineExpr::var(rm.primed[k]) - rm.images[k]));
    }
    cs.insert(cs.end(), rm.domain.begin(), rm.domain.end());
    os << name << "_R(" << join(names, ", ") << ") := " << product_text({}, cs) << "\n";
  }
  for (const auto& [name, extents] : p.shapes) {
    std::vector<std::string> parts;
    for (const auto& e : extents) parts.push_back(e.str());
    os << name << "_S := (" << join(parts, ", ") << ")\n";
  }
  return os.str();
}

Summand simplify_summand(Summand s) {
  std::vector<Constraint> kept;
  for (Constraint c : s.constraints) {
    Truth t = normalize(c);
    if (t == Truth::True) continue;
    if (t == Truth::False) {
      s.empty = true;
      s.constraints = {Constraint::ge(AffineExpr(Rational(-1)))};
      return s;
    }
    if (std::find(kept.begin(), kept.end(), c) == kept.end()) kept.push_back(std::move(c));
  }

  // Pivot equalities: each defines its latest-appearing unit-coefficient
  // iterator in terms of the others.
  auto position = [&](const std::string& v) {
    auto it = std::find(s.iterators.begin(), s.iterators.end(), v);
    return it == s.iterators.end() ? -1 : static_cast<int>(it - s.iterators.begin());
  };
  std::vector<std::pair<std::string, AffineExpr>> subst;
  std::vector<bool> is_pivot(kept.size(), false);
  auto canonical = [&](Constraint c) {
    for (const auto& [v, value] : subst) c = c.substitute(v, value);
    Truth t = normalize(c);
    return std::make_pair(t, c);
  };
  for (std::size_t k = 0; k < kept.size(); ++k) {
    if (kept[k].kind != ConstraintKind::Eq) continue;
    auto [t, c] = canonical(kept[k]);
    if (t != Truth::Unknown) continue;
    std::string pivot;
    for (const auto& [v, a] : c.expr.coeffs()) {
      if (a.abs() != Rational(1) || position(v) < 0) continue;
      if (pivot.empty() || position(v) > position(pivot)) pivot = v;
    }
    if (pivot.empty()) continue;
    AffineExpr rest = c.expr;
    Rational a = c.expr.coeff(pivot);
    rest.set_coeff(pivot, 0);
    AffineExpr value = rest * (Rational(-1) / a);
    for (auto& [v, prev] : subst) prev = prev.substitute(pivot, value);
    subst.emplace_back(pivot, value);
    is_pivot[k] = true;
  }

  std::vector<Constraint> out;
  std::vector<Constraint> seen;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    if (is_pivot[k]) {
      out.push_back(kept[k]);
      continue;
    }
    auto [t, c] = canonical(kept[k]);
    if (t == Truth::True) continue;
    if (t == Truth::False) {
      s.empty = true;
      s.constraints = {Constraint::ge(AffineExpr(Rational(-1)))};
      return s;
    }
    if (std::find(seen.begin(), seen.end(), c) != seen.end()) continue;
    seen.push_back(c);
    out.push_back(kept[k]);
  }
  s.constraints = std::move(out);
  s.empty = false;
  return s;
}

std::vector<Summand> build_compressed_summands(const Program& p, const std::string& name) {
  const Rule& rule = p.rule(name);
  std::vector<Summand> out;
  for (const auto& s : rule.summands) {
    std::vector<const Access*> accesses{&s.output};
    for (const auto& a : s.inputs) accesses.push_back(&a);
    std::vector<std::vector<std::vector<Constraint>>> options;
    for (std::size_t k = 0; k < accesses.size(); ++k) {
      const Access& a = *accesses[k];
      auto it = p.unique_sets.find(a.tensor);
      if (it == p.unique_sets.end()) {
        // Unstructured tensor: every coordinate is unique.
        options.push_back({{}});
        continue;
      }
      const UniqueSet& us = it->second;
      if (us.iters.size() != a.indices.size()) {
        throw Error(ErrorKind::Arity, "access " + a.str() + " has " +
                                          std::to_string(a.indices.size()) +
                                          " indices but the unique set of '" + a.tensor +
                                          "' has " + std::to_string(us.iters.size()));
      }
      std::map<std::string, std::string> rename;
      for (std::size_t d = 0; d < us.iters.size(); ++d) rename[us.iters[d]] = a.indices[d];
      std::vector<std::vector<Constraint>> alts;
      for (const auto& alt : us.alternatives) {
        std::vector<Constraint> renamed;
        for (const auto& c : alt) renamed.push_back(c.rename(rename));
        alts.push_back(std::move(renamed));
      }
      options.push_back(std::move(alts));
    }

    std::vector<std::size_t> choice(options.size(), 0);
    while (true) {
      Summand t = s;
      for (std::size_t k = 0; k < options.size(); ++k) {
        const auto& alt = options[k][choice[k]];
        t.constraints.insert(t.constraints.end(), alt.begin(), alt.end());
      }
      for (const auto& c : t.constraints) {
        for (const auto& v : constraint_names_in_order(c)) {
          bool iter = std::find(t.iterators.begin(), t.iterators.end(), v) != t.iterators.end();
          bool known = std::find(t.symbols.begin(), t.symbols.end(), v) != t.symbols.end();
          if (!iter && !known) t.symbols.push_back(v);
        }
      }
      t = simplify_summand(std::move(t));
      if (!t.empty) out.push_back(std::move(t));
      std::size_t k = 0;
      while (k < options.size() && ++choice[k] == options[k].size()) choice[k++] = 0;
      if (k == options.size()) break;
    }
  }
  return out;
}

Polyhedron iteration_space(const Summand& s) {
  Polyhedron p;
  p.dims = s.iterators;
  p.params = s.symbols;
  p.constraints = s.constraints;
  p.empty = s.empty;
  if (!p.empty) dim_bounds(p);
  return p;
}

}  // namespace polypack
