#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "homext/errors.hpp"

namespace homext {

struct RationalOverflow : Error {
  RationalOverflow() : Error("exact rational arithmetic overflow") {}
};

/* Exact rational arithmetic on int64 with __int128 intermediates. Normalized
   invariant: den > 0 and gcd(|num|, den) = 1. The exact path never rounds;
   anything that would overflow throws instead of degrading silently. */
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n) : num(n), den(1) {}
  Rational(long long n, long long d) { *this = normalized(n, d); }

  static Rational normalized(__int128 n, __int128 d) {
    if (d == 0) throw Error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 g = gcd128(a, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX) throw RationalOverflow();
    Rational r;
    r.num = (long long)n;
    r.den = (long long)d;
    return r;
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a < 0 ? -a : a;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return normalized((__int128)a.num * b.den + (__int128)b.num * a.den, (__int128)a.den * b.den);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return normalized((__int128)a.num * b.den - (__int128)b.num * a.den, (__int128)a.den * b.den);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return normalized((__int128)a.num * b.num, (__int128)a.den * b.den);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num == 0) throw Error("rational division by zero");
    return normalized((__int128)a.num * b.den, (__int128)a.den * b.num);
  }
  friend Rational operator-(const Rational& a) { return Rational(-a.num, a.den); }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return (__int128)a.num * b.den < (__int128)b.num * a.den;
  }

  bool is_integer() const { return den == 1; }
  bool is_zero() const { return num == 0; }
  // true iff this lies in {0, -1, -2, ...}
  bool is_nonpositive_integer() const { return den == 1 && num <= 0; }
  bool is_nonnegative_integer() const { return den == 1 && num >= 0; }

  long long floor_ll() const {
    long long q = num / den;
    if (num % den != 0 && num < 0) --q;
    return q;
  }

  double to_double() const { return double(num) / double(den); }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

/* Degree values: either an exact rational (case decisions, combinatorics) or a
   floating complex. The exact tag is what makes memberships like a ∈ -N
   decidable; complex-tagged degrees only ever flow through the floating
   formulas. */
struct RationalDegree {
  bool exact = true;
  Rational rat;
  Cplx approx_val{0.0, 0.0};

  RationalDegree() = default;
  RationalDegree(long long n) : exact(true), rat(n) {}
  RationalDegree(const Rational& r) : exact(true), rat(r) {}

  static RationalDegree exact_rational(const Rational& r) {
    RationalDegree d;
    d.exact = true;
    d.rat = r;
    return d;
  }
  static RationalDegree approx(Cplx z) {
    RationalDegree d;
    d.exact = false;
    d.approx_val = z;
    return d;
  }

  Cplx value() const { return exact ? Cplx(rat.to_double(), 0.0) : approx_val; }
  double real() const { return exact ? rat.to_double() : approx_val.real(); }
  bool is_nonpositive_integer() const { return exact && rat.is_nonpositive_integer(); }

  std::string str() const {
    if (exact) return rat.str();
    return std::to_string(approx_val.real()) +
           (approx_val.imag() != 0.0 ? "+" + std::to_string(approx_val.imag()) + "i" : "");
  }
};

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline Rational rational_factorial(int n) {
  Rational f(1);
  for (int i = 2; i <= n; ++i) f = f * Rational(i);
  return f;
}

// Generalized binomial coefficient C(z, l) = z(z-1)...(z-l+1)/l!.
inline Rational gen_binomial(const Rational& z, int l) {
  Rational p(1);
  for (int i = 0; i < l; ++i) p = p * (z - Rational(i));
  return p / rational_factorial(l);
}

inline Cplx gen_binomial(Cplx z, int l) {
  Cplx p(1.0);
  for (int i = 0; i < l; ++i) p *= (z - double(i));
  return p / factorial(l);
}

inline RationalDegree gen_binomial(const RationalDegree& z, int l) {
  if (z.exact) return RationalDegree::exact_rational(gen_binomial(z.rat, l));
  return RationalDegree::approx(gen_binomial(z.approx_val, l));
}

// Rising product (a)_k = a(a+1)...(a+k-1).
inline Cplx pochhammer_rising(Cplx a, int k) {
  Cplx p(1.0);
  for (int i = 0; i < k; ++i) p *= (a + double(i));
  return p;
}

inline Rational pochhammer_rising(const Rational& a, int k) {
  Rational p(1);
  for (int i = 0; i < k; ++i) p = p * (a + Rational(i));
  return p;
}

// Exact check of sum_k C(i,k) C(-a,l-k) = C(i-a,l).
inline bool vandermonde_check(int i, const Rational& a, int l) {
  Rational lhs(0);
  for (int k = 0; k <= l; ++k) {
    lhs = lhs + gen_binomial(Rational(i), k) * gen_binomial(-a, l - k);
  }
  Rational rhs = gen_binomial(Rational(i) - a, l);
  return lhs == rhs;
}

}  // namespace homext
