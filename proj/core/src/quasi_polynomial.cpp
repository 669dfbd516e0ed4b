#include "polypack/quasi_polynomial.hpp"

#include <algorithm>
#include <sstream>

#include "polypack/error.hpp"

namespace polypack {

namespace {

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out = a;
  for (const auto& [v, e] : b) out[v] += e;
  return out;
}

Rational binomial(int n, int k) {
  Rational r(1);
  for (int i = 1; i <= k; ++i) r = r * Rational(n - k + i) / Rational(i);
  return r;
}

}  // namespace

QuasiPolynomial::QuasiPolynomial(Rational constant) { add_term({}, constant); }

QuasiPolynomial::QuasiPolynomial(const AffineExpr& e) {
  add_term({}, e.constant());
  for (const auto& [name, c] : e.coeffs()) add_term({{name, 1}}, c);
}

QuasiPolynomial QuasiPolynomial::var(const std::string& name) {
  QuasiPolynomial p;
  p.add_term({{name, 1}}, 1);
  return p;
}

void QuasiPolynomial::add_term(const Monomial& m, const Rational& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

bool QuasiPolynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational QuasiPolynomial::constant() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

std::set<std::string> QuasiPolynomial::vars() const {
  std::set<std::string> out;
  for (const auto& [m, c] : terms_) {
    for (const auto& [v, e] : m) out.insert(v);
  }
  return out;
}

bool QuasiPolynomial::mentions(const std::string& name) const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [&](const auto& t) { return t.first.count(name) != 0; });
}

int QuasiPolynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) {
    int total = 0;
    for (const auto& [v, e] : m) total += e;
    d = std::max(d, total);
  }
  return d;
}

int QuasiPolynomial::degree_in(const std::string& name) const {
  int d = 0;
  for (const auto& [m, c] : terms_) {
    auto it = m.find(name);
    if (it != m.end()) d = std::max(d, it->second);
  }
  return d;
}

std::vector<QuasiPolynomial> QuasiPolynomial::coefficients_in(const std::string& name) const {
  std::vector<QuasiPolynomial> out(static_cast<std::size_t>(degree_in(name)) + 1);
  for (const auto& [m, c] : terms_) {
    Monomial rest = m;
    int e = 0;
    if (auto it = rest.find(name); it != rest.end()) {
      e = it->second;
      rest.erase(it);
    }
    out[static_cast<std::size_t>(e)].add_term(rest, c);
  }
  return out;
}

QuasiPolynomial& QuasiPolynomial::operator+=(const QuasiPolynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

QuasiPolynomial& QuasiPolynomial::operator-=(const QuasiPolynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

QuasiPolynomial& QuasiPolynomial::operator*=(const QuasiPolynomial& o) {
  QuasiPolynomial out;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) out.add_term(multiply(ma, mb), ca * cb);
  }
  *this = std::move(out);
  return *this;
}

QuasiPolynomial QuasiPolynomial::operator-() const {
  QuasiPolynomial out;
  for (const auto& [m, c] : terms_) out.add_term(m, -c);
  return out;
}

QuasiPolynomial QuasiPolynomial::pow(int k) const {
  QuasiPolynomial out(Rational(1));
  for (int i = 0; i < k; ++i) out *= *this;
  return out;
}

QuasiPolynomial QuasiPolynomial::substitute(const std::string& name,
                                            const QuasiPolynomial& value) const {
  if (!mentions(name)) return *this;
  auto coeffs = coefficients_in(name);
  QuasiPolynomial out;
  QuasiPolynomial power(Rational(1));
  for (std::size_t e = 0; e < coeffs.size(); ++e) {
    if (e > 0) power *= value;
    out += coeffs[e] * power;
  }
  return out;
}

QuasiPolynomial QuasiPolynomial::rename(const std::map<std::string, std::string>& names) const {
  QuasiPolynomial out;
  for (const auto& [m, c] : terms_) {
    Monomial r;
    for (const auto& [v, e] : m) {
      auto it = names.find(v);
      r[it == names.end() ? v : it->second] += e;
    }
    out.add_term(r, c);
  }
  return out;
}

Rational QuasiPolynomial::evaluate(const Binding& binding) const {
  Rational total;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (const auto& [v, e] : m) {
      auto it = binding.find(v);
      if (it == binding.end()) {
        throw Error(ErrorKind::Binding, "no value bound for '" + v + "'");
      }
      for (int i = 0; i < e; ++i) t *= Rational(it->second);
    }
    total += t;
  }
  return total;
}

std::int64_t QuasiPolynomial::denominator_lcm() const {
  std::int64_t l = 1;
  for (const auto& [m, c] : terms_) l = lcm64(l, c.den());
  return l;
}

std::string QuasiPolynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  auto emit = [&](const Monomial& m, const Rational& c) {
    Rational mag = c.abs();
    if (first) {
      if (c.sign() < 0) os << "-";
    } else {
      os << (c.sign() < 0 ? " - " : " + ");
    }
    first = false;
    bool need_star = false;
    if (m.empty() || mag != Rational(1)) {
      os << mag.str();
      need_star = true;
    }
    for (const auto& [v, e] : m) {
      if (need_star) os << "*";
      os << v;
      if (e > 1) os << "^" << e;
      need_star = true;
    }
  };
  for (const auto& [m, c] : terms_) {
    if (!m.empty()) emit(m, c);
  }
  if (auto it = terms_.find(Monomial{}); it != terms_.end()) emit(it->first, it->second);
  return os.str();
}

Rational bernoulli(int k) {
  // Recurrence for the B_1 = -1/2 convention, flipped at the end.
  std::vector<Rational> b(static_cast<std::size_t>(k) + 1);
  for (int m = 0; m <= k; ++m) {
    if (m == 0) {
      b[0] = 1;
      continue;
    }
    Rational acc;
    for (int j = 0; j < m; ++j) acc += binomial(m + 1, j) * b[static_cast<std::size_t>(j)];
    b[static_cast<std::size_t>(m)] = -acc / Rational(m + 1);
  }
  Rational out = b[static_cast<std::size_t>(k)];
  return k == 1 ? -out : out;
}

QuasiPolynomial power_sum(int k, const QuasiPolynomial& n) {
  // S_k(n) = 1/(k+1) * sum_j C(k+1, j) B_j n^(k+1-j)
  QuasiPolynomial out;
  for (int j = 0; j <= k; ++j) {
    Rational c = binomial(k + 1, j) * bernoulli(j) / Rational(k + 1);
    if (c.is_zero()) continue;
    out += QuasiPolynomial(c) * n.pow(k + 1 - j);
  }
  return out;
}

QuasiPolynomial faulhaber_sum(const QuasiPolynomial& p, const std::string& v,
                              const AffineExpr& lb, const AffineExpr& ub, int max_degree) {
  auto coeffs = p.coefficients_in(v);
  if (static_cast<int>(coeffs.size()) - 1 > max_degree) {
    throw Error(ErrorKind::DegreeOverflow,
                "degree " + std::to_string(coeffs.size() - 1) + " in '" + v +
                    "' exceeds the maximum " + std::to_string(max_degree));
  }
  const QuasiPolynomial upper(ub);
  const QuasiPolynomial below(lb - AffineExpr(Rational(1)));
  QuasiPolynomial out;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k].is_zero()) continue;
    int kk = static_cast<int>(k);
    out += coeffs[k] * (power_sum(kk, upper) - power_sum(kk, below));
  }
  return out;
}

CompiledPolynomial::CompiledPolynomial(const QuasiPolynomial& p, const SlotMap& slots)
    : scale_(p.denominator_lcm()) {
  for (const auto& [m, c] : p.terms()) {
    Term t;
    t.coeff = (c * Rational(scale_)).to_integer();
    for (const auto& [v, e] : m) t.factors.emplace_back(slots.at(v), e);
    terms_.push_back(std::move(t));
  }
}

std::int64_t CompiledPolynomial::eval(std::span<const std::int64_t> values) const {
  __int128 total = 0;
  for (const auto& t : terms_) {
    __int128 x = t.coeff;
    for (const auto& [slot, e] : t.factors) {
      for (int i = 0; i < e; ++i) x *= values[static_cast<std::size_t>(slot)];
    }
    total += x;
  }
  if (total % scale_ != 0) {
    throw Error(ErrorKind::NonIntegral, "polynomial value is not an integer");
  }
  total /= scale_;
  if (total > INT64_MAX || total < INT64_MIN) {
    throw Error(ErrorKind::Overflow, "polynomial value exceeds 64 bits");
  }
  return static_cast<std::int64_t>(total);
}

}  // namespace polypack
