#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "formlet/bigint.hpp"

namespace formlet {

// Exponent vector keyed by symbol id; trailing zeros are trimmed so equal
// monomials compare equal.
using Monomial = std::vector<int>;

// Descending pure lexicographic order, symbols ranked by declaration order
// (lower id = higher rank).  Map iteration therefore starts at the leading
// monomial and matches the printed order.
struct MonoBefore {
  bool operator()(const Monomial& a, const Monomial& b) const {
    size_t n = a.size() > b.size() ? a.size() : b.size();
    for (size_t i = 0; i < n; ++i) {
      int ea = i < a.size() ? a[i] : 0;
      int eb = i < b.size() ? b[i] : 0;
      if (ea != eb) return ea > eb;
    }
    return false;
  }
};

using SymbolNamer = std::function<std::string(int)>;

// Multivariate polynomial with arbitrary-precision integer coefficients.
// Invariant: no stored coefficient is zero; monomial keys are trimmed.
class Polynomial {
 public:
  Polynomial() = default;
  static Polynomial constant(Int c);
  static Polynomial symbol(int id, int exp = 1);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  // Valid only when is_constant().
  const Int& constant_value() const;
  bool is_one() const;

  size_t term_count() const { return terms_.size(); }
  const std::map<Monomial, Int, MonoBefore>& terms() const { return terms_; }

  // Leading monomial/coefficient under the canonical order; poly must be
  // nonzero.
  const Monomial& leading_monomial() const { return terms_.begin()->first; }
  const Int& leading_coefficient() const { return terms_.begin()->second; }

  int degree_in(int var) const;
  int total_degree() const;
  bool uses_symbol(int var) const { return degree_in(var) > 0; }
  // Largest symbol id appearing with positive exponent, -1 if constant.
  int max_symbol() const;

  void add_term(const Monomial& m, const Int& c);

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.terms_ == b.terms_;
  }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }
  // Total order compatible with the canonical monomial order; used wherever a
  // deterministic polynomial order is needed.
  static int compare(const Polynomial& a, const Polynomial& b);

  // Substitute `value` for symbol `var`.
  Polynomial substitute(int var, const Polynomial& value) const;
  // Coefficient of var^k, viewed in the remaining symbols.
  Polynomial univar_coefficient(int var, int k) const;

  // gcd of the integer coefficients (nonnegative; 0 for the zero poly).
  Int integer_content() const;

  std::string to_string(const SymbolNamer& names) const;

 private:
  std::map<Monomial, Int, MonoBefore> terms_;
};

Polynomial poly_add(const Polynomial& a, const Polynomial& b);
Polynomial poly_mul(const Polynomial& a, const Polynomial& b);
Polynomial poly_pow(const Polynomial& a, int e);

// Exact division; nullopt when b does not divide a (b must be nonzero).
std::optional<Polynomial> poly_exact_div(const Polynomial& a, const Polynomial& b);

// Fully reduced gcd, leading coefficient positive; gcd(0,0) = 0.
Polynomial poly_gcd(const Polynomial& a, const Polynomial& b);

}  // namespace formlet
