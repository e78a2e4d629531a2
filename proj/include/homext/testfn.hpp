#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "homext/jet.hpp"

namespace homext {

using Vec = std::vector<double>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return !(lo < hi); }
  static Interval all() {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
  static Interval hull(const Interval& a, const Interval& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
  }
  static Interval intersect(const Interval& a, const Interval& b) {
    return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  }
  bool contains(double x) const { return x > lo && x < hi; }
};

/* One-dimensional test function: a finite sum of bump-polynomial terms
   c * x^m * B((x-x0)/h) with B the standard mollifier profile. The family is
   closed under x -> c*x (including reflection) and supports exact derivative
   evaluation of any order through jets, which is what regularized-power
   pairings consume. */
class TestFn {
 public:
  struct Term {
    Cplx coeff{1.0, 0.0};
    int power = 0;       // monomial degree m
    double center = 0.0; // x0
    double width = 1.0;  // h > 0
  };

  TestFn() = default;
  explicit TestFn(std::vector<Term> terms) : terms_(std::move(terms)) {}

  static TestFn bump(double center, double width, Cplx coeff = Cplx(1.0), int power = 0) {
    return TestFn({Term{coeff, power, center, width}});
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Interval support() const {
    Interval s{0.0, 0.0};
    bool first = true;
    for (const auto& t : terms_) {
      Interval ti{t.center - t.width, t.center + t.width};
      s = first ? ti : Interval::hull(s, ti);
      first = false;
    }
    return s;
  }

  Cplx value(double x) const {
    Cplx acc(0.0);
    for (const auto& t : terms_) {
      const double y = (x - t.center) / t.width;
      if (y <= -1.0 || y >= 1.0) continue;
      double mono = 1.0;
      for (int i = 0; i < t.power; ++i) mono *= x;
      acc += t.coeff * mono * mollifier(y);
    }
    return acc;
  }

  Jet jet(double x, int order) const {
    if (order > kDefaultMaxDerivativeOrder) throw UnsupportedOrderError(order);
    return jet_compose(Jet::variable(x, order));
  }

  // Evaluate on an inner jet (composition with a smooth reparameterization).
  Jet jet_compose(const Jet& xv) const {
    Jet acc(xv.order());
    const double x = xv.value().real();
    for (const auto& t : terms_) {
      const double y0 = (x - t.center) / t.width;
      if (y0 <= -1.0 || y0 >= 1.0) continue;
      Jet y = (xv - Cplx(t.center)) * Cplx(1.0 / t.width);
      Jet term = mollifier_jet(y) * t.coeff;
      for (int i = 0; i < t.power; ++i) term = term * xv;
      acc += term;
    }
    return acc;
  }

  Cplx derivative(double x, int order) const { return jet(x, order).derivative(order); }

  // f(c x); c != 0 (negative c reflects, using that B is even).
  TestFn scaled_arg(double c) const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
      Term s = t;
      double cm = 1.0;
      for (int i = 0; i < t.power; ++i) cm *= c;
      s.coeff = t.coeff * cm;
      s.center = t.center / c;
      s.width = t.width / std::abs(c);
      out.push_back(s);
    }
    return TestFn(std::move(out));
  }

  TestFn scaled(Cplx factor) const {
    std::vector<Term> out = terms_;
    for (auto& t : out) t.coeff *= factor;
    return TestFn(std::move(out));
  }

  friend TestFn operator+(const TestFn& a, const TestFn& b) {
    std::vector<Term> out = a.terms_;
    out.insert(out.end(), b.terms_.begin(), b.terms_.end());
    return TestFn(std::move(out));
  }

 private:
  std::vector<Term> terms_;
};

/* Type-erased smooth 1-D function with jet evaluation; the common currency for
   integrands, slices of product test functions, and composed pairing
   arguments. Outside the recorded support it evaluates to exactly zero. */
class Fn1 {
 public:
  using JetFn = std::function<Jet(double, int)>;
  using ValFn = std::function<Cplx(double)>;

  Fn1() : support_{0.0, 0.0} {}
  Fn1(JetFn f, Interval supp) : f_(std::move(f)), support_(supp) {
    v_ = [g = f_](double x) { return g(x, 0).value(); };
  }
  Fn1(JetFn f, ValFn v, Interval supp) : f_(std::move(f)), v_(std::move(v)), support_(supp) {}

  static Fn1 from(const TestFn& t) {
    return Fn1([t](double x, int order) { return t.jet(x, order); },
               [t](double x) { return t.value(x); }, t.support());
  }

  static Fn1 constant(Cplx v) {
    return Fn1([v](double, int order) { return Jet::constant(v, order); },
               [v](double) { return v; }, Interval::all());
  }

  static Fn1 zero() { return Fn1(); }

  // t^expo on (0, inf); zero for t <= 0.
  static Fn1 power(Cplx expo) {
    return Fn1(
        [expo](double x, int order) {
          if (x <= 0.0) return Jet(order);
          return pow(Jet::variable(x, order), expo);
        },
        [expo](double x) { return x > 0.0 ? std::pow(Cplx(x), expo) : Cplx(0.0); },
        Interval{0.0, std::numeric_limits<double>::infinity()});
  }

  // ln t on (0, inf).
  static Fn1 log_fn() {
    return Fn1(
        [](double x, int order) {
          if (x <= 0.0) return Jet(order);
          return log(Jet::variable(x, order));
        },
        [](double x) { return x > 0.0 ? Cplx(std::log(x)) : Cplx(0.0); },
        Interval{0.0, std::numeric_limits<double>::infinity()});
  }

  bool is_zero() const { return !f_; }
  Interval support() const { return support_; }

  Jet jet(double x, int order) const {
    if (!f_ || !support_.contains(x)) return Jet(order);
    return f_(x, order);
  }

  Cplx value(double x) const {
    if (!v_ || !support_.contains(x)) return Cplx(0.0);
    return v_(x);
  }

  Cplx derivative(double x, int order) const { return jet(x, order).derivative(order); }

  // f(c x), c != 0.
  Fn1 scaled_arg(double c) const {
    if (!f_) return Fn1();
    JetFn g = [f = f_, c](double x, int order) {
      Jet inner = f(c * x, order);
      // chain rule for affine substitution: coefficient j picks up c^j
      Jet out(order);
      double cj = 1.0;
      for (int j = 0; j <= order; ++j) {
        out.set_coeff(j, inner.coeff(j) * cj);
        cj *= c;
      }
      return out;
    };
    double a = support_.lo / c, b = support_.hi / c;
    if (a > b) std::swap(a, b);
    return Fn1(std::move(g), [v = v_, c](double x) { return v(c * x); }, Interval{a, b});
  }

  // f(-x)
  Fn1 reflected() const { return scaled_arg(-1.0); }

  Fn1 scaled(Cplx factor) const {
    if (!f_) return Fn1();
    return Fn1([f = f_, factor](double x, int order) { return f(x, order) * factor; },
               [v = v_, factor](double x) { return v(x) * factor; }, support_);
  }

  // m-th derivative as a function. Taylor coefficients shift:
  // (f^(m)) has c'_j = c_{m+j} (m+j)!/j!.
  Fn1 derivative_fn(int m) const {
    if (!f_ || m == 0) return *this;
    JetFn g = [f = f_, m](double x, int order) {
      Jet inner = f(x, order + m);
      Jet out(order);
      for (int j = 0; j <= order; ++j) {
        double fac = 1.0;
        for (int i = j + 1; i <= j + m; ++i) fac *= i;
        out.set_coeff(j, inner.coeff(j + m) * fac);
      }
      return out;
    };
    ValFn v = [f = f_, m](double x) {
      double fac = 1.0;
      for (int i = 2; i <= m; ++i) fac *= i;
      return f(x, m).coeff(m) * fac;
    };
    return Fn1(std::move(g), std::move(v), support_);
  }

  friend Fn1 operator*(const Fn1& a, const Fn1& b) {
    if (a.is_zero() || b.is_zero()) return Fn1();
    Interval s = Interval::intersect(a.support_, b.support_);
    if (s.empty()) return Fn1();
    return Fn1([fa = a.f_, fb = b.f_](double x, int order) { return fa(x, order) * fb(x, order); },
               [va = a.v_, vb = b.v_](double x) { return va(x) * vb(x); }, s);
  }

  friend Fn1 operator+(const Fn1& a, const Fn1& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    Interval sa = a.support_, sb = b.support_;
    return Fn1(
        [fa = a.f_, fb = b.f_, sa, sb](double x, int order) {
          Jet r(order);
          if (sa.contains(x)) r += fa(x, order);
          if (sb.contains(x)) r += fb(x, order);
          return r;
        },
        [va = a.v_, vb = b.v_, sa, sb](double x) {
          Cplx r(0.0);
          if (sa.contains(x)) r += va(x);
          if (sb.contains(x)) r += vb(x);
          return r;
        },
        Interval::hull(sa, sb));
  }

 private:
  JetFn f_;
  ValFn v_;
  Interval support_;
};

/* Tensor-sum test function on R^n x R: sum over summands of
   (prod_i phi_i(X_i)) * psi(t), all factors bump-polynomials. Closed under
   the coordinate scalings the zoom actions induce. */
struct ProductTestFn {
  struct Summand {
    std::vector<TestFn> x;  // one factor per fiber coordinate
    TestFn t;
  };

  int n = 1;
  std::vector<Summand> summands;

  static ProductTestFn tensor(int n, std::vector<TestFn> x_factors, TestFn t_factor) {
    ProductTestFn p;
    p.n = n;
    p.summands.push_back({std::move(x_factors), std::move(t_factor)});
    return p;
  }

  Cplx value(const Vec& X, double t) const {
    Cplx acc(0.0);
    for (const auto& s : summands) {
      Cplx prod = s.t.value(t);
      for (int i = 0; i < n && prod != Cplx(0.0); ++i) prod *= s.x[size_t(i)].value(X[size_t(i)]);
      acc += prod;
    }
    return acc;
  }

  // t -> phi(X, t) as a jet-evaluable 1-D function.
  Fn1 t_slice(const Vec& X) const {
    Fn1 acc;
    for (const auto& s : summands) {
      Cplx k(1.0);
      for (int i = 0; i < n; ++i) k *= s.x[size_t(i)].value(X[size_t(i)]);
      if (k == Cplx(0.0)) continue;
      acc = acc + Fn1::from(s.t).scaled(k);
    }
    return acc;
  }

  ProductTestFn scale_x(double c) const {
    ProductTestFn out = *this;
    for (auto& s : out.summands)
      for (auto& f : s.x) f = f.scaled_arg(c);
    return out;
  }

  ProductTestFn scale_t(double c) const {
    ProductTestFn out = *this;
    for (auto& s : out.summands) s.t = s.t.scaled_arg(c);
    return out;
  }

  friend ProductTestFn operator+(const ProductTestFn& a, const ProductTestFn& b) {
    ProductTestFn out = a;
    out.summands.insert(out.summands.end(), b.summands.begin(), b.summands.end());
    return out;
  }

  Interval x_support(int i) const {
    Interval s{0.0, 0.0};
    bool first = true;
    for (const auto& sm : summands) {
      Interval si = sm.x[size_t(i)].support();
      s = first ? si : Interval::hull(s, si);
      first = false;
    }
    return s;
  }

  Interval t_support() const {
    Interval s{0.0, 0.0};
    bool first = true;
    for (const auto& sm : summands) {
      Interval si = sm.t.support();
      s = first ? si : Interval::hull(s, si);
      first = false;
    }
    return s;
  }
};

// Test functions on the sphere-cross-line S^{n-1} x R: tensor sums of a
// pointwise sphere factor and a bump-polynomial factor in t.
struct SphereLineFn {
  using SphereFactor = std::function<Cplx(const Vec&)>;

  struct Summand {
    SphereFactor omega;
    TestFn t;
  };

  int n = 1;  // ambient fiber dimension; the sphere is S^{n-1}
  std::vector<Summand> summands;

  static SphereLineFn tensor(int n, SphereFactor om, TestFn t) {
    SphereLineFn g;
    g.n = n;
    g.summands.push_back({std::move(om), std::move(t)});
    return g;
  }

  static SphereLineFn isotropic(int n, TestFn t) {
    return tensor(n, [](const Vec&) { return Cplx(1.0); }, std::move(t));
  }

  Fn1 t_slice(const Vec& omega) const {
    Fn1 acc;
    for (const auto& s : summands) {
      Cplx k = s.omega(omega);
      if (k == Cplx(0.0)) continue;
      acc = acc + Fn1::from(s.t).scaled(k);
    }
    return acc;
  }

  // g(omega, c t)
  SphereLineFn scale_t(double c) const {
    SphereLineFn out = *this;
    for (auto& s : out.summands) s.t = s.t.scaled_arg(c);
    return out;
  }

  Interval t_support() const {
    Interval s{0.0, 0.0};
    bool first = true;
    for (const auto& sm : summands) {
      Interval si = sm.t.support();
      s = first ? si : Interval::hull(s, si);
      first = false;
    }
    return s;
  }
};

// Fully general evaluable function on R^n x R, presented as per-X slices in t.
// Density-backed oracles can pair against these; structured oracles cannot.
struct ModelSliceFn {
  int n = 1;
  std::function<Fn1(const Vec&)> slice;
  std::vector<Interval> x_box;  // finite bounding box of the X-support
  Interval t_bound = Interval::all();
  // radial support window |X| in [lo, hi]; tightens the box when the support
  // is an annulus (extraction weights, cutoff factors)
  Interval r_window{0.0, std::numeric_limits<double>::infinity()};
};

// General evaluable function on S^{n-1} x R.
struct SphereSliceFn {
  int n = 1;
  std::function<Fn1(const Vec&)> slice;
};

inline ModelSliceFn to_slice(const ProductTestFn& phi) {
  ModelSliceFn m;
  m.n = phi.n;
  std::vector<Interval> box;
  for (int i = 0; i < phi.n; ++i) box.push_back(phi.x_support(i));
  m.x_box = box;
  m.t_bound = phi.t_support();
  auto copy = std::make_shared<ProductTestFn>(phi);
  m.slice = [copy](const Vec& X) { return copy->t_slice(X); };
  return m;
}

inline SphereSliceFn to_slice(const SphereLineFn& g) {
  SphereSliceFn s;
  s.n = g.n;
  auto copy = std::make_shared<SphereLineFn>(g);
  s.slice = [copy](const Vec& omega) { return copy->t_slice(omega); };
  return s;
}

}  // namespace homext
