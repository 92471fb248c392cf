#include <doctest.h>

#include "formlet/error.hpp"
#include "formlet/rational.hpp"
#include "randgen.hpp"

using namespace formlet;

namespace {

Polynomial D() { return Polynomial::symbol(0); }
Polynomial W() { return Polynomial::symbol(1); }
Polynomial X() { return Polynomial::symbol(2); }
Polynomial C(long v) { return Polynomial::constant(v); }

}  // namespace

TEST_CASE("rational product reduces") {
  // (d-1)/1 * 1/(d^2-1) = 1/(d+1)
  RationalCoefficient a = RationalCoefficient::of(D() - C(1), C(1));
  RationalCoefficient b = RationalCoefficient::of(C(1), D() * D() - C(1));
  RationalCoefficient p = rat_mul(a, b);
  CHECK(p.num == C(1));
  CHECK(p.den == D() + C(1));
}

TEST_CASE("rational sum over distinct denominators") {
  // 1/(w-3) + 1/(w-4) = (2w-7)/(w^2-7w+12)
  RationalCoefficient a = RationalCoefficient::of(C(1), W() - C(3));
  RationalCoefficient b = RationalCoefficient::of(C(1), W() - C(4));
  RationalCoefficient s = rat_add(a, b);
  CHECK(s.num == C(2) * W() - C(7));
  CHECK(s.den == W() * W() - C(7) * W() + C(12));
}

TEST_CASE("denominator sign is normalized") {
  RationalCoefficient r = RationalCoefficient::of(C(3), -(D()) + C(1));
  CHECK(r.den == D() - C(1));
  CHECK(r.num == C(-3));
  RationalCoefficient q = RationalCoefficient::of(-C(4), C(-6));
  CHECK(q.num == C(2));
  CHECK(q.den == C(3));
}

TEST_CASE("series expansion matches frozen values") {
  ExpansionSetting s{2, 3};
  RationalCoefficient a = RationalCoefficient::of(C(1), C(1) - X());
  Polynomial series = rat_expand(a, s);
  CHECK(series == C(1) + X() + X() * X() + X() * X() * X());

  ExpansionSetting s2{2, 2};
  RationalCoefficient b = RationalCoefficient::of(C(1), (C(1) - X()) * (C(1) - X()));
  CHECK(rat_expand(b, s2) == C(1) + C(2) * X() + C(3) * X() * X());
}

TEST_CASE("series expansion errors") {
  ExpansionSetting s{2, 3};
  RationalCoefficient bad = RationalCoefficient::of(C(1), X());
  CHECK_THROWS_AS(rat_expand(bad, s), Error);
  RationalCoefficient multi = RationalCoefficient::of(D(), C(1) - X());
  CHECK_THROWS_AS(rat_expand(multi, s), Error);
  // Non-integral series is still exact as a rational.
  RationalCoefficient half = RationalCoefficient::of(C(1), C(2) - X());
  CHECK_THROWS_AS(rat_expand(half, s), Error);
  // 1/(2-x) through x^1 is 1/2 + x/4 = (x + 2)/4.
  RationalCoefficient r = rat_expand_series(half, ExpansionSetting{2, 1});
  CHECK(r.num == X() + C(2));
  CHECK(r.den == C(4));
}

TEST_CASE("series satisfies den*series = num mod x^(n+1)") {
  testing::Rng rng(404u);
  for (int it = 0; it < 300; ++it) {
    Polynomial num = testing::rand_poly(rng, 1, 3, 3);
    Polynomial den = testing::rand_poly(rng, 1, 3, 3);
    if (den.univar_coefficient(0, 0).is_zero())
      den += Polynomial::constant(testing::rand_int(rng, 1, 5));
    int order = testing::rand_int(rng, 0, 4);
    RationalCoefficient a = RationalCoefficient::of(num, den);
    RationalCoefficient s = rat_expand_series(a, ExpansionSetting{0, order});
    // a.den * s.num - a.num * s.den must vanish through x^order.
    Polynomial resid = a.den * s.num - a.num * s.den;
    for (int k = 0; k <= order; ++k)
      CHECK(resid.univar_coefficient(0, k).is_zero());
  }
}

TEST_CASE("rational field laws hold on random inputs") {
  testing::Rng rng(515u);
  for (int it = 0; it < 400; ++it) {
    RationalCoefficient a = testing::rand_rat(rng, 2, 2);
    RationalCoefficient b = testing::rand_rat(rng, 2, 2);
    RationalCoefficient c = testing::rand_rat(rng, 2, 2);
    CHECK(rat_add(a, b) == rat_add(b, a));
    CHECK(rat_mul(a, b) == rat_mul(b, a));
    CHECK(rat_add(rat_add(a, b), c) == rat_add(a, rat_add(b, c)));
    CHECK(rat_mul(rat_mul(a, b), c) == rat_mul(a, rat_mul(b, c)));
    CHECK(rat_mul(a, rat_add(b, c)) == rat_add(rat_mul(a, b), rat_mul(a, c)));
    CHECK(rat_add(a, rat_neg(a)).is_zero());
    // Representation stays reduced and sign-normalized.
    RationalCoefficient r = rat_mul(a, b);
    if (!r.is_zero()) {
      CHECK(poly_gcd(r.num, r.den).is_one());
      CHECK(r.den.leading_coefficient() > 0);
    } else {
      CHECK(r.den.is_one());
    }
  }
}
