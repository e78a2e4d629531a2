#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <complex>

#include "homext/errors.hpp"

namespace homext {

// Hard cap on truncation order; public entry points enforce their own limits
// (default 16) below this.
inline constexpr int kMaxJetOrder = 20;
inline constexpr int kDefaultMaxDerivativeOrder = 16;

/* Truncated Taylor series ("jet") about an evaluation point, used as the
   forward-mode scalar of the engine. Coefficients are Taylor coefficients,
   c[j] = f^(j)(x0)/j!, so the k-th derivative is k! * c[k]. All smooth
   building blocks (mollifier, powers, logs) evaluate through this type, which
   keeps every derivative the pairings consume exact up to roundoff. */
class Jet {
 public:
  explicit Jet(int order) : n_(order) {
    assert(order >= 0 && order <= kMaxJetOrder);
    c_.fill(Cplx(0.0, 0.0));
  }

  static Jet constant(Cplx v, int order) {
    Jet j(order);
    j.c_[0] = v;
    return j;
  }

  static Jet variable(double x, int order) {
    Jet j(order);
    j.c_[0] = Cplx(x, 0.0);
    if (order >= 1) j.c_[1] = Cplx(1.0, 0.0);
    return j;
  }

  int order() const { return n_; }
  Cplx coeff(int k) const { return k <= n_ ? c_[k] : Cplx(0.0); }
  void set_coeff(int k, Cplx v) {
    assert(k <= n_);
    c_[k] = v;
  }
  Cplx value() const { return c_[0]; }

  Cplx derivative(int k) const {
    if (k > n_) return Cplx(0.0);
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return fact * c_[k];
  }

  Jet& operator+=(const Jet& o) {
    assert(o.n_ == n_);
    for (int k = 0; k <= n_; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    assert(o.n_ == n_);
    for (int k = 0; k <= n_; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(Cplx s) {
    for (int k = 0; k <= n_; ++k) c_[k] *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, Cplx s) { return a *= s; }
  friend Jet operator*(Cplx s, Jet a) { return a *= s; }
  friend Jet operator-(const Jet& a) {
    Jet r(a.n_);
    for (int k = 0; k <= a.n_; ++k) r.c_[k] = -a.c_[k];
    return r;
  }

  friend Jet operator+(Jet a, Cplx s) {
    a.c_[0] += s;
    return a;
  }
  friend Jet operator+(Cplx s, Jet a) {
    a.c_[0] += s;
    return a;
  }
  friend Jet operator-(Jet a, Cplx s) {
    a.c_[0] -= s;
    return a;
  }
  friend Jet operator-(Cplx s, const Jet& a) { return (-a) + s; }

  // Cauchy product, truncated.
  friend Jet operator*(const Jet& a, const Jet& b) {
    assert(a.n_ == b.n_);
    Jet r(a.n_);
    for (int k = 0; k <= a.n_; ++k) {
      Cplx acc(0.0);
      for (int j = 0; j <= k; ++j) acc += a.c_[j] * b.c_[k - j];
      r.c_[k] = acc;
    }
    return r;
  }

  // q = a/b with b0 != 0: q_k = (a_k - sum_{j=1..k} b_j q_{k-j}) / b_0.
  friend Jet operator/(const Jet& a, const Jet& b) {
    assert(a.n_ == b.n_);
    Jet q(a.n_);
    const Cplx inv = 1.0 / b.c_[0];
    for (int k = 0; k <= a.n_; ++k) {
      Cplx acc = a.c_[k];
      for (int j = 1; j <= k; ++j) acc -= b.c_[j] * q.c_[k - j];
      q.c_[k] = acc * inv;
    }
    return q;
  }

  friend Jet operator/(Cplx s, const Jet& b) { return Jet::constant(s, b.n_) / b; }
  friend Jet operator/(Jet a, Cplx s) { return a *= (1.0 / s); }

  // e_k = (1/k) sum_{j=1..k} j a_j e_{k-j}.
  friend Jet exp(const Jet& a) {
    Jet e(a.n_);
    e.c_[0] = std::exp(a.c_[0]);
    for (int k = 1; k <= a.n_; ++k) {
      Cplx acc(0.0);
      for (int j = 1; j <= k; ++j) acc += double(j) * a.c_[j] * e.c_[k - j];
      e.c_[k] = acc / double(k);
    }
    return e;
  }

  // Principal log; intended for jets with positive real value part.
  friend Jet log(const Jet& a) {
    Jet l(a.n_);
    l.c_[0] = std::log(a.c_[0]);
    const Cplx inv = 1.0 / a.c_[0];
    for (int k = 1; k <= a.n_; ++k) {
      Cplx acc = a.c_[k];
      for (int j = 1; j < k; ++j) acc -= (double(j) / double(k)) * l.c_[j] * a.c_[k - j];
      l.c_[k] = acc * inv;
    }
    return l;
  }

  // a^alpha = exp(alpha log a); base value must stay off the branch cut.
  friend Jet pow(const Jet& a, Cplx alpha) { return exp(log(a) * alpha); }

 private:
  int n_;
  std::array<Cplx, kMaxJetOrder + 1> c_;
};

// Standard mollifier profile B(y) = exp(-1/(1-y^2)) on |y|<1, 0 outside.
// Below w = 1-y^2 ~ 1/700 the true value is under 1e-300; returning the zero
// jet there avoids inf*0 in the chain rule while staying exact to double.
inline Jet mollifier_jet(const Jet& y) {
  const double yv = y.value().real();
  const double w0 = 1.0 - yv * yv;
  if (w0 <= 1.0 / 700.0) return Jet(y.order());
  Jet w = Cplx(1.0) - y * y;
  return exp(Cplx(-1.0) / w);
}

inline double mollifier(double y) {
  const double w0 = 1.0 - y * y;
  if (w0 <= 1.0 / 700.0) return 0.0;
  return std::exp(-1.0 / w0);
}

}  // namespace homext
