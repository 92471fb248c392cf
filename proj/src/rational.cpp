#include "formlet/rational.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include "formlet/error.hpp"

namespace formlet {

using Rational = boost::multiprecision::cpp_rational;

RationalCoefficient RationalCoefficient::integer(Int n, Int d) {
  return rat_normalize(Polynomial::constant(std::move(n)),
                       Polynomial::constant(std::move(d)));
}

RationalCoefficient RationalCoefficient::of(Polynomial n, Polynomial d) {
  return rat_normalize(std::move(n), std::move(d));
}

RationalCoefficient rat_normalize(Polynomial num, Polynomial den) {
  if (den.is_zero()) throw Error(ErrorKind::DivisionByZero, "zero denominator");
  RationalCoefficient r;
  if (num.is_zero()) return r;
  Polynomial g = poly_gcd(num, den);
  if (!g.is_one()) {
    num = *poly_exact_div(num, g);
    den = *poly_exact_div(den, g);
  }
  if (den.leading_coefficient() < 0) {
    num = -num;
    den = -den;
  }
  r.num = std::move(num);
  r.den = std::move(den);
  return r;
}

RationalCoefficient rat_add(const RationalCoefficient& a, const RationalCoefficient& b) {
  return rat_normalize(a.num * b.den + b.num * a.den, a.den * b.den);
}

RationalCoefficient rat_mul(const RationalCoefficient& a, const RationalCoefficient& b) {
  return rat_normalize(a.num * b.num, a.den * b.den);
}

RationalCoefficient rat_neg(const RationalCoefficient& a) {
  RationalCoefficient r = a;
  r.num = -r.num;
  return r;
}

RationalCoefficient rat_expand_series(const RationalCoefficient& a,
                                      const ExpansionSetting& s) {
  int v = s.variable;
  for (int sym = 0; sym <= std::max(a.num.max_symbol(), a.den.max_symbol()); ++sym) {
    if (sym == v) continue;
    if (a.num.uses_symbol(sym) || a.den.uses_symbol(sym))
      throw Error(ErrorKind::ExpansionUnsupported,
                  "coefficient involves a symbol other than the expansion variable");
  }

  auto coeff_at = [v](const Polynomial& p, int k) -> Int {
    Polynomial c = p.univar_coefficient(v, k);
    return c.is_zero() ? Int(0) : c.constant_value();
  };
  Int d0 = coeff_at(a.den, 0);
  if (d0 == 0)
    throw Error(ErrorKind::DenominatorVanishesAtZero,
                "cannot expand about 0");

  // c_k solves sum_j den_j * c_{k-j} = num_k.
  std::vector<Rational> c(s.order + 1);
  for (int k = 0; k <= s.order; ++k) {
    Rational acc(coeff_at(a.num, k));
    for (int j = 1; j <= k; ++j) acc -= Rational(coeff_at(a.den, j)) * c[k - j];
    c[k] = acc / Rational(d0);
  }

  Int common(1);
  for (const Rational& q : c) {
    Int d = denominator(q);
    common = common / int_gcd(common, d) * d;
  }
  Polynomial series;
  for (int k = 0; k <= s.order; ++k) {
    Rational scaled = c[k] * Rational(common);
    series += Polynomial::symbol(v, k) * Polynomial::constant(numerator(scaled));
  }
  return rat_normalize(std::move(series), Polynomial::constant(common));
}

Polynomial rat_expand(const RationalCoefficient& a, const ExpansionSetting& s) {
  RationalCoefficient r = rat_expand_series(a, s);
  if (!r.den.is_one())
    throw Error(ErrorKind::NonIntegralSeries,
                "truncated series is not an integer polynomial");
  return r.num;
}

}  // namespace formlet
