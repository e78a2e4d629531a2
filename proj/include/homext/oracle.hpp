#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <utility>

#include "homext/quadrature.hpp"
#include "homext/testfn.hpp"

namespace homext {

struct Pairing {
  Cplx value{0.0, 0.0};
  double err = 0.0;
};

/* Tensor argument with a general (jet-evaluable) t part: sum over summands of
   (prod_i f_i(X_i)) * g(t) with f_i in the bump-polynomial family and g any
   Fn1. Product test functions embed; several operations (dilation
   factorization, boundary pairings) need exactly this shape. */
struct TensorArg {
  struct Summand {
    std::vector<Fn1> x;
    Fn1 t;
  };
  int n = 1;
  std::vector<Summand> summands;

  static TensorArg from(const ProductTestFn& phi) {
    TensorArg a;
    a.n = phi.n;
    for (const auto& s : phi.summands) {
      Summand out;
      for (const auto& f : s.x) out.x.push_back(Fn1::from(f));
      out.t = Fn1::from(s.t);
      a.summands.push_back(std::move(out));
    }
    return a;
  }

  static TensorArg tensor(int n, std::vector<Fn1> xs, Fn1 t) {
    TensorArg a;
    a.n = n;
    a.summands.push_back({std::move(xs), std::move(t)});
    return a;
  }

  ModelSliceFn to_slice() const {
    ModelSliceFn m;
    m.n = n;
    std::vector<Interval> box(size_t(n), Interval{0.0, 0.0});
    Interval tb{0.0, 0.0};
    bool first = true;
    for (const auto& s : summands) {
      for (int i = 0; i < n; ++i) {
        Interval si = s.x[size_t(i)].support();
        box[size_t(i)] = first ? si : Interval::hull(box[size_t(i)], si);
      }
      tb = first ? s.t.support() : Interval::hull(tb, s.t.support());
      first = false;
    }
    m.x_box = box;
    m.t_bound = tb;
    auto copy = std::make_shared<TensorArg>(*this);
    m.slice = [copy](const Vec& X) {
      Fn1 acc;
      for (const auto& s : copy->summands) {
        Cplx k(1.0);
        for (int i = 0; i < copy->n; ++i) k *= s.x[size_t(i)].value(X[size_t(i)]);
        if (k == Cplx(0.0)) continue;
        acc = acc + s.t.scaled(k);
      }
      return acc;
    };
    return m;
  }
};

/* A distribution on R^n x R, represented by what it can be paired with. Every
   oracle pairs with tensor arguments; density- and trace-backed oracles also
   pair with fully general slice functions (cutoff limits, polar extraction).
   Values are immutable; pairing is pure. */
class ModelOracle {
 public:
  using TensorPairFn = std::function<Pairing(const TensorArg&)>;
  using SlicePairFn = std::function<Pairing(const ModelSliceFn&)>;

  ModelOracle() = default;

  static ModelOracle from_tensor(int n, TensorPairFn f) {
    ModelOracle o;
    o.n_ = n;
    o.tensor_ = std::move(f);
    return o;
  }

  static ModelOracle from_slices(int n, SlicePairFn f) {
    ModelOracle o;
    o.n_ = n;
    o.slice_ = f;
    o.tensor_ = [f](const TensorArg& a) { return f(a.to_slice()); };
    return o;
  }

  int dim() const { return n_; }
  bool has_general() const { return bool(slice_); }

  Pairing pair(const ProductTestFn& phi) const { return tensor_(TensorArg::from(phi)); }
  Pairing pair(const TensorArg& a) const { return tensor_(a); }
  Pairing pair(const ModelSliceFn& f) const {
    if (!slice_)
      throw PreconditionError("this distribution only pairs with tensor test functions");
    return slice_(f);
  }

  friend ModelOracle operator+(const ModelOracle& a, const ModelOracle& b) {
    ModelOracle o;
    o.n_ = a.n_;
    auto ta = a.tensor_, tb = b.tensor_;
    o.tensor_ = [ta, tb](const TensorArg& arg) {
      Pairing pa = ta(arg), pb = tb(arg);
      return Pairing{pa.value + pb.value, pa.err + pb.err};
    };
    if (a.slice_ && b.slice_) {
      auto sa = a.slice_, sb = b.slice_;
      o.slice_ = [sa, sb](const ModelSliceFn& arg) {
        Pairing pa = sa(arg), pb = sb(arg);
        return Pairing{pa.value + pb.value, pa.err + pb.err};
      };
    }
    return o;
  }

  ModelOracle scaled(Cplx k) const {
    ModelOracle o;
    o.n_ = n_;
    auto t = tensor_;
    o.tensor_ = [t, k](const TensorArg& a) {
      Pairing p = t(a);
      return Pairing{k * p.value, std::abs(k) * p.err};
    };
    if (slice_) {
      auto s = slice_;
      o.slice_ = [s, k](const ModelSliceFn& a) {
        Pairing p = s(a);
        return Pairing{k * p.value, std::abs(k) * p.err};
      };
    }
    return o;
  }

 private:
  int n_ = 1;
  TensorPairFn tensor_;
  SlicePairFn slice_;
};

// Distribution on the real line.
class LineOracle {
 public:
  using PairFn = std::function<Pairing(const Fn1&)>;
  LineOracle() = default;
  explicit LineOracle(PairFn f) : pair_(std::move(f)) {}
  Pairing pair(const Fn1& f) const { return pair_(f); }
  Pairing pair(const TestFn& f) const { return pair_(Fn1::from(f)); }
 private:
  PairFn pair_;
};

/* Equal-weight sphere grids. n=1: the two-point sphere. n=2: composite
   trapezoid in angle, spectrally accurate for smooth integrands. Higher n is
   out of certified scope. */
struct SphereGrid {
  int n = 1;
  std::vector<Vec> points;
  std::vector<double> weights;

  static SphereGrid standard(int n, int angular_points = 48) {
    SphereGrid g;
    g.n = n;
    if (n == 1) {
      g.points = {{1.0}, {-1.0}};
      g.weights = {1.0, 1.0};
    } else if (n == 2) {
      const double w = 2.0 * M_PI / angular_points;
      for (int j = 0; j < angular_points; ++j) {
        const double th = 2.0 * M_PI * j / angular_points;
        g.points.push_back({std::cos(th), std::sin(th)});
        g.weights.push_back(w);
      }
    } else {
      throw PreconditionError("sphere quadrature is certified for n in {1,2} only");
    }
    return g;
  }
};

// Distribution on the sphere-cross-line S^{n-1} x R.
class TraceOracle {
 public:
  using PairFn = std::function<Pairing(const SphereSliceFn&)>;
  TraceOracle() = default;
  TraceOracle(int n, PairFn f) : n_(n), pair_(std::move(f)) {}
  int dim() const { return n_; }
  Pairing pair(const SphereLineFn& g) const { return pair_(to_slice(g)); }
  Pairing pair(const SphereSliceFn& g) const { return pair_(g); }

  friend TraceOracle operator+(const TraceOracle& a, const TraceOracle& b) {
    auto pa = a.pair_, pb = b.pair_;
    return TraceOracle(a.n_, [pa, pb](const SphereSliceFn& g) {
      Pairing x = pa(g), y = pb(g);
      return Pairing{x.value + y.value, x.err + y.err};
    });
  }

  TraceOracle scaled(Cplx k) const {
    auto p = pair_;
    return TraceOracle(n_, [p, k](const SphereSliceFn& g) {
      Pairing x = p(g);
      return Pairing{k * x.value, std::abs(k) * x.err};
    });
  }

 private:
  int n_ = 1;
  PairFn pair_;
};

struct DensityOptions {
  double tol = 1e-10;
  int sphere_points = 48;
  // p <= -1 radial singularities are only integrable against test functions
  // supported off X = 0; set this to have the oracle enforce that.
  bool punctured = false;
  // Support metadata. Quadrature windows are intersections of the test
  // function's support with these; without them, narrow densities would be
  // invisible to panel rules when probes are pulled back to extreme scales.
  double radius = std::numeric_limits<double>::infinity();  // dens = 0 for |X| > radius
  std::function<Interval(double r)> t_window;               // dens(X, .) support at |X| = r
};

namespace detail {

inline double box_inner_radius(const std::vector<Interval>& box) {
  double d2 = 0.0;
  for (const auto& iv : box) {
    double c = 0.0;
    if (iv.lo > 0.0) c = iv.lo;
    if (iv.hi < 0.0) c = iv.hi;
    d2 += c * c;
  }
  return std::sqrt(d2);
}

inline double box_outer_radius(const std::vector<Interval>& box) {
  double d2 = 0.0;
  for (const auto& iv : box) d2 += std::max(iv.lo * iv.lo, iv.hi * iv.hi);
  return std::sqrt(d2);
}

}  // namespace detail

/* Density-backed oracle: pairs phi as integral of dens(X,t) phi(X,t) dX dt.
   Integration runs in polar coordinates over the fibers (radial adaptivity
   soaks up |X|^p singularities with p > -1) with the t integral innermost. */
inline ModelOracle density_oracle(int n, std::function<Cplx(const Vec&, double)> dens,
                                  DensityOptions opt = {}) {
  SphereGrid grid = SphereGrid::standard(n, opt.sphere_points);
  auto pair = [n, dens, grid, opt](const ModelSliceFn& arg) -> Pairing {
    if (int(arg.x_box.size()) != n)
      throw PreconditionError("test-function box dimension mismatch");
    const double r_hi =
        std::min({detail::box_outer_radius(arg.x_box), opt.radius, arg.r_window.hi});
    const double r_lo = std::max(detail::box_inner_radius(arg.x_box), arg.r_window.lo);
    if (opt.punctured && r_lo <= 0.0)
      throw PreconditionError(
          "distribution lives on the punctured space; test support must avoid X=0");
    if (!(r_hi > r_lo)) return {};
    QuadOptions inner_opt;
    inner_opt.abs_tol = opt.tol * 0.1;
    QuadOptions outer_opt;
    outer_opt.abs_tol = opt.tol;
    double err_acc = 0.0;
    auto radial = [&](double r) -> Cplx {
      Cplx acc(0.0);
      Interval window = opt.t_window ? opt.t_window(r) : Interval::all();
      for (size_t j = 0; j < grid.points.size(); ++j) {
        Vec X(static_cast<size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) X[size_t(i)] = r * grid.points[j][size_t(i)];
        Fn1 slice = arg.slice(X);
        if (slice.is_zero()) continue;
        Interval ts = Interval::intersect(Interval::intersect(slice.support(), arg.t_bound),
                                          window);
        if (ts.empty()) continue;
        QuadResult q = integrate([&](double t) { return dens(X, t) * slice.value(t); }, ts.lo,
                                 ts.hi, inner_opt);
        acc += grid.weights[j] * q.value;
        err_acc += grid.weights[j] * q.err;
      }
      double rpow = 1.0;
      for (int i = 0; i < n - 1; ++i) rpow *= r;
      return acc * rpow;
    };
    QuadResult q = integrate(radial, r_lo, r_hi, outer_opt);
    return {q.value, q.err + err_acc};
  };
  return ModelOracle::from_slices(n, pair);
}

// Density-backed trace w0(omega, tau) d sigma d tau on S^{n-1} x R.
inline TraceOracle trace_density(int n, std::function<Cplx(const Vec&, double)> w0,
                                 Interval tau_support, DensityOptions opt = {}) {
  SphereGrid grid = SphereGrid::standard(n, opt.sphere_points);
  auto pair = [w0, grid, tau_support, opt](const SphereSliceFn& g) -> Pairing {
    QuadOptions qopt;
    qopt.abs_tol = opt.tol;
    Cplx acc(0.0);
    double err = 0.0;
    for (size_t j = 0; j < grid.points.size(); ++j) {
      Fn1 slice = g.slice(grid.points[j]);
      if (slice.is_zero()) continue;
      Interval ts = Interval::intersect(slice.support(), tau_support);
      if (ts.empty()) continue;
      const Vec& om = grid.points[j];
      QuadResult q =
          integrate([&](double tau) { return w0(om, tau) * slice.value(tau); }, ts.lo, ts.hi, qopt);
      acc += grid.weights[j] * q.value;
      err += grid.weights[j] * q.err;
    }
    return {acc, err};
  };
  return TraceOracle(n, pair);
}

// Point-evaluation trace g -> int_S g(omega, 0) d sigma(omega).
inline TraceOracle trace_point_eval(int n, int sphere_points = 48) {
  SphereGrid grid = SphereGrid::standard(n, sphere_points);
  auto pair = [grid](const SphereSliceFn& g) -> Pairing {
    Cplx acc(0.0);
    for (size_t j = 0; j < grid.points.size(); ++j)
      acc += grid.weights[j] * g.slice(grid.points[j]).value(0.0);
    return {acc, 0.0};
  };
  return TraceOracle(n, pair);
}

}  // namespace homext
