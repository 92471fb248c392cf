#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace formlet {

using Int = boost::multiprecision::cpp_int;

inline Int int_gcd(Int a, Int b) {
  using boost::multiprecision::abs;
  a = abs(a);
  b = abs(b);
  while (b != 0) {
    Int r = a % b;
    a = b;
    b = r;
  }
  return a;
}

inline int int_sign(const Int& a) { return a == 0 ? 0 : (a > 0 ? 1 : -1); }

}  // namespace formlet
