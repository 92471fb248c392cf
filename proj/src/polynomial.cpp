#include "formlet/polynomial.hpp"

#include <algorithm>

#include "formlet/error.hpp"

namespace formlet {

namespace {

void trim(Monomial& m) {
  while (!m.empty() && m.back() == 0) m.pop_back();
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  trim(r);
  return r;
}

// a / b when every exponent of b is covered; nullopt otherwise.
std::optional<Monomial> mono_div(const Monomial& a, const Monomial& b) {
  if (b.size() > a.size()) return std::nullopt;
  Monomial r = a;
  for (size_t i = 0; i < b.size(); ++i) {
    r[i] -= b[i];
    if (r[i] < 0) return std::nullopt;
  }
  trim(r);
  return r;
}

}  // namespace

Polynomial Polynomial::constant(Int c) {
  Polynomial p;
  if (c != 0) p.terms_.emplace(Monomial{}, std::move(c));
  return p;
}

Polynomial Polynomial::symbol(int id, int exp) {
  if (exp == 0) return constant(1);
  Polynomial p;
  Monomial m(id + 1, 0);
  m[id] = exp;
  p.terms_.emplace(std::move(m), Int(1));
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

const Int& Polynomial::constant_value() const {
  static const Int zero(0);
  if (terms_.empty()) return zero;
  return terms_.begin()->second;
}

bool Polynomial::is_one() const { return is_constant() && constant_value() == 1; }

int Polynomial::degree_in(int var) const {
  int d = 0;
  for (const auto& [m, c] : terms_)
    if ((size_t)var < m.size() && m[var] > d) d = m[var];
  return d;
}

int Polynomial::total_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) {
    int s = 0;
    for (int e : m) s += e;
    if (s > d) d = s;
  }
  return d;
}

int Polynomial::max_symbol() const {
  int v = -1;
  for (const auto& [m, c] : terms_)
    if ((int)m.size() - 1 > v) v = (int)m.size() - 1;
  return v;
}

void Polynomial::add_term(const Monomial& m, const Int& c) {
  if (c == 0) return;
  Monomial key = m;
  trim(key);
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(std::move(key), c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial r;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) r.add_term(mono_mul(ma, mb), ca * cb);
  return r;
}

int Polynomial::compare(const Polynomial& a, const Polynomial& b) {
  auto ia = a.terms_.begin(), ib = b.terms_.begin();
  MonoBefore before;
  for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
    if (before(ia->first, ib->first)) return -1;
    if (before(ib->first, ia->first)) return 1;
    if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
  }
  if (ia != a.terms_.end()) return 1;
  if (ib != b.terms_.end()) return -1;
  return 0;
}

Polynomial Polynomial::substitute(int var, const Polynomial& value) const {
  Polynomial r;
  std::vector<Polynomial> powers{Polynomial::constant(1)};
  for (const auto& [m, c] : terms_) {
    int e = (size_t)var < m.size() ? m[var] : 0;
    Monomial rest = m;
    if ((size_t)var < rest.size()) rest[var] = 0;
    trim(rest);
    while ((int)powers.size() <= e) powers.push_back(powers.back() * value);
    Polynomial part;
    part.add_term(rest, c);
    r += part * powers[e];
  }
  return r;
}

Polynomial Polynomial::univar_coefficient(int var, int k) const {
  Polynomial r;
  for (const auto& [m, c] : terms_) {
    int e = (size_t)var < m.size() ? m[var] : 0;
    if (e != k) continue;
    Monomial rest = m;
    if ((size_t)var < rest.size()) rest[var] = 0;
    trim(rest);
    r.add_term(rest, c);
  }
  return r;
}

Int Polynomial::integer_content() const {
  Int g = 0;
  for (const auto& [m, c] : terms_) {
    g = int_gcd(g, c);
    if (g == 1) break;
  }
  return g;
}

std::string Polynomial::to_string(const SymbolNamer& names) const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  bool single = terms_.size() == 1;
  for (const auto& [m, c] : terms_) {
    bool neg = c < 0;
    Int mag = neg ? Int(-c) : c;
    if (first) {
      if (neg) out += single ? "-" : " - ";
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;
    std::string body;
    bool empty_mono = true;
    for (size_t v = 0; v < m.size(); ++v) {
      if (m[v] == 0) continue;
      empty_mono = false;
      if (!body.empty()) body += '*';
      body += names((int)v);
      if (m[v] != 1) {
        body += '^';
        body += std::to_string(m[v]);
      }
    }
    if (empty_mono) {
      out += mag.str();
    } else {
      if (mag != 1) {
        out += mag.str();
        out += '*';
      }
      out += body;
    }
  }
  return out;
}

Polynomial poly_add(const Polynomial& a, const Polynomial& b) { return a + b; }
Polynomial poly_mul(const Polynomial& a, const Polynomial& b) { return a * b; }

Polynomial poly_pow(const Polynomial& a, int e) {
  if (e < 0) throw Error(ErrorKind::Internal, "negative polynomial power");
  Polynomial r = Polynomial::constant(1);
  for (int i = 0; i < e; ++i) r = r * a;
  return r;
}

std::optional<Polynomial> poly_exact_div(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) return std::nullopt;
  Polynomial rem = a, quot;
  while (!rem.is_zero()) {
    auto m = mono_div(rem.leading_monomial(), b.leading_monomial());
    if (!m) return std::nullopt;
    Int c = rem.leading_coefficient() / b.leading_coefficient();
    if (c * b.leading_coefficient() != rem.leading_coefficient()) return std::nullopt;
    Polynomial t;
    t.add_term(*m, c);
    quot += t;
    rem -= t * b;
  }
  return quot;
}

namespace {

// a viewed as univariate in `var`; index = degree.
std::vector<Polynomial> to_univar(const Polynomial& a, int var) {
  std::vector<Polynomial> r(a.degree_in(var) + 1);
  for (int k = 0; k < (int)r.size(); ++k) r[k] = a.univar_coefficient(var, k);
  return r;
}

Polynomial from_univar(const std::vector<Polynomial>& u, int var) {
  Polynomial r;
  for (int k = 0; k < (int)u.size(); ++k)
    r += u[k] * Polynomial::symbol(var, k);
  return r;
}

Polynomial must_div(const Polynomial& a, const Polynomial& b) {
  auto q = poly_exact_div(a, b);
  if (!q) throw Error(ErrorKind::Internal, "inexact division in gcd");
  return *q;
}

// Pseudo-remainder of a by b in `var`: exactly lc(b)^(da-db+1) * a mod b, so
// the subresultant divisions stay exact even when leading terms cancel early.
Polynomial pseudo_rem(Polynomial a, const Polynomial& b, int var) {
  int db = b.degree_in(var);
  Polynomial lcb = b.univar_coefficient(var, db);
  int steps = a.degree_in(var) - db + 1;
  int da;
  while (!a.is_zero() && (da = a.degree_in(var)) >= db) {
    Polynomial lca = a.univar_coefficient(var, da);
    Polynomial shift = Polynomial::symbol(var, da - db);
    a = a * lcb - b * (lca * shift);
    --steps;
  }
  return a * poly_pow(lcb, steps);
}

Polynomial gcd_rec(Polynomial a, Polynomial b);

// Content of a with respect to `var` (gcd of its univariate coefficients).
Polynomial univar_content(const Polynomial& a, int var) {
  Polynomial c;
  for (const Polynomial& k : to_univar(a, var)) {
    if (k.is_zero()) continue;
    c = gcd_rec(c, k);
    if (c.is_constant() && c.constant_value() == 1) break;
  }
  return c;
}

Polynomial normalize_lead(Polynomial p) {
  if (!p.is_zero() && p.leading_coefficient() < 0) return -p;
  return p;
}

Polynomial gcd_rec(Polynomial a, Polynomial b) {
  if (a.is_zero()) return normalize_lead(b);
  if (b.is_zero()) return normalize_lead(a);
  int va = a.max_symbol(), vb = b.max_symbol();
  if (va < 0 && vb < 0)
    return Polynomial::constant(int_gcd(a.constant_value(), b.constant_value()));
  int var = std::max(va, vb);
  if (a.degree_in(var) == 0) return gcd_rec(a, univar_content(b, var));
  if (b.degree_in(var) == 0) return gcd_rec(b, univar_content(a, var));

  Polynomial ca = univar_content(a, var), cb = univar_content(b, var);
  Polynomial gamma = gcd_rec(ca, cb);
  Polynomial f = must_div(a, ca), g = must_div(b, cb);
  if (f.degree_in(var) < g.degree_in(var)) std::swap(f, g);

  // Subresultant polynomial remainder sequence.
  Polynomial gg = Polynomial::constant(1), h = Polynomial::constant(1);
  Polynomial pp;
  while (true) {
    int d = f.degree_in(var) - g.degree_in(var);
    Polynomial r = pseudo_rem(f, g, var);
    if (r.is_zero()) {
      pp = must_div(g, univar_content(g, var));
      break;
    }
    if (r.degree_in(var) == 0) {
      pp = Polynomial::constant(1);
      break;
    }
    f = g;
    g = must_div(r, gg * poly_pow(h, d));
    gg = f.univar_coefficient(var, f.degree_in(var));
    if (d > 0) h = must_div(poly_pow(gg, d), poly_pow(h, d - 1));
  }
  return normalize_lead(gamma * pp);
}

}  // namespace

Polynomial poly_gcd(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero()) return b.is_zero() ? a : poly_gcd(b, a);
  // Integer and monomial content come out first; the recursion then works on
  // primitive parts only.
  Int ia = a.integer_content();
  Int ib = b.is_zero() ? Int(0) : b.integer_content();
  Int ig = b.is_zero() ? ia : int_gcd(ia, ib);

  auto min_exponents = [](const Polynomial& p) {
    Monomial m;
    bool first = true;
    for (const auto& [mono, c] : p.terms()) {
      if (first) {
        m = mono;
        first = false;
        continue;
      }
      if (mono.size() < m.size()) m.resize(mono.size());
      for (size_t i = 0; i < m.size(); ++i)
        m[i] = std::min(m[i], i < mono.size() ? mono[i] : 0);
    }
    while (!m.empty() && m.back() == 0) m.pop_back();
    return m;
  };

  auto strip_mono = [](const Polynomial& p, const Monomial& m) {
    if (m.empty()) return p;
    Polynomial shift;
    shift.add_term(m, 1);
    auto q = poly_exact_div(p, shift);
    return *q;
  };

  Monomial ma = min_exponents(a);
  Monomial mg = ma;
  if (!b.is_zero()) {
    Monomial mb = min_exponents(b);
    if (mb.size() < mg.size()) mg.resize(mb.size());
    for (size_t i = 0; i < mg.size(); ++i)
      mg[i] = std::min(mg[i], i < mb.size() ? mb[i] : 0);
    while (!mg.empty() && mg.back() == 0) mg.pop_back();
  }

  Polynomial pa = strip_mono(a, mg);
  Polynomial core;
  if (b.is_zero()) {
    core = pa;
    if (!core.is_zero() && core.leading_coefficient() < 0) core = -core;
  } else {
    Polynomial pb = strip_mono(b, mg);
    auto qa = poly_exact_div(pa, Polynomial::constant(ia));
    auto qb = poly_exact_div(pb, Polynomial::constant(ib));
    core = gcd_rec(*qa, *qb) * Polynomial::constant(ig);
  }
  Polynomial shift;
  shift.add_term(mg, 1);
  return core * shift;
}

}  // namespace formlet
