#pragma once

#include <string>

#include "formlet/polynomial.hpp"

namespace formlet {

// Ratio of two polynomials, kept fully reduced with the denominator's leading
// coefficient positive; zero is canonically 0/1.
struct RationalCoefficient {
  Polynomial num = Polynomial::constant(0);
  Polynomial den = Polynomial::constant(1);

  static RationalCoefficient integer(Int n, Int d = 1);
  static RationalCoefficient of(Polynomial n, Polynomial d);

  bool is_zero() const { return num.is_zero(); }
  bool is_one() const { return num.is_one() && den.is_one(); }

  friend bool operator==(const RationalCoefficient& a, const RationalCoefficient& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const RationalCoefficient& a, const RationalCoefficient& b) {
    return !(a == b);
  }
};

RationalCoefficient rat_normalize(Polynomial num, Polynomial den);
RationalCoefficient rat_add(const RationalCoefficient& a, const RationalCoefficient& b);
RationalCoefficient rat_mul(const RationalCoefficient& a, const RationalCoefficient& b);
RationalCoefficient rat_neg(const RationalCoefficient& a);

struct ExpansionSetting {
  int variable = -1;  // symbol id
  int order = 0;      // series kept through variable^order
};

// Truncated power series of a.num/a.den about variable = 0.  Exact rational
// series; the result denominator is a positive integer constant.
RationalCoefficient rat_expand_series(const RationalCoefficient& a,
                                      const ExpansionSetting& s);

// Same series when it has integer coefficients; error otherwise.
Polynomial rat_expand(const RationalCoefficient& a, const ExpansionSetting& s);

}  // namespace formlet
