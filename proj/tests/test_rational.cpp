#include <doctest.h>

#include "homext/rational.hpp"

using namespace homext;

TEST_CASE("rational arithmetic normalizes") {
  Rational a(2, 4);
  CHECK(a.num == 1);
  CHECK(a.den == 2);
  Rational b(1, -3);
  CHECK(b.num == -1);
  CHECK(b.den == 3);
  CHECK((a + b) == Rational(1, 6));
  CHECK((a * b) == Rational(-1, 6));
  CHECK((a / b) == Rational(-3, 2));
  CHECK(Rational(-7, 2).floor_ll() == -4);
  CHECK(Rational(0).is_nonpositive_integer());
  CHECK(Rational(-3).is_nonpositive_integer());
  CHECK(!Rational(1, 2).is_nonpositive_integer());
}

TEST_CASE("generalized binomial") {
  CHECK(gen_binomial(Rational(-1), 2) == Rational(1));        // (-1)(-2)/2
  CHECK(gen_binomial(Rational(1, 2), 2) == Rational(-1, 8));  // (1/2)(-1/2)/2
  CHECK(gen_binomial(Rational(3), 5) == Rational(0));         // integer z < l
  CHECK(gen_binomial(Rational(5), 2) == Rational(10));
}

TEST_CASE("rising product") {
  CHECK(pochhammer_rising(Rational(3, 5), 1) == Rational(3, 5));
  CHECK(pochhammer_rising(Rational(-1, 2), 2) == Rational(-1, 4));  // (-1/2)(1/2)
  Cplx p = pochhammer_rising(Cplx(0.6, 0.0), 1);
  CHECK(p.real() == doctest::Approx(0.6));
}

TEST_CASE("vandermonde identity: trivial reductions") {
  // i = 0, l = 1 reduces to C(-a,1) = C(-a,1)
  CHECK(vandermonde_check(0, Rational(7, 3), 1));
  CHECK(vandermonde_check(2, Rational(1, 3), 3));
  CHECK(vandermonde_check(5, Rational(-2), 4));
}

TEST_CASE("vandermonde identity: exhaustive exact sweep") {
  // all 0 <= i,l <= 8 and a = p/q with |p| <= 9, 1 <= q <= 4
  for (int q = 1; q <= 4; ++q)
    for (int p = -9; p <= 9; ++p) {
      Rational a(p, q);
      for (int i = 0; i <= 8; ++i)
        for (int l = 0; l <= 8; ++l) {
          CAPTURE(p);
          CAPTURE(q);
          CAPTURE(i);
          CAPTURE(l);
          REQUIRE(vandermonde_check(i, a, l));
        }
    }
}
