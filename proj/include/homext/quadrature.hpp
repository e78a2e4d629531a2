#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <type_traits>
#include <vector>

#include "homext/errors.hpp"
#include "homext/testfn.hpp"

namespace homext {

struct QuadOptions {
  double abs_tol = 1e-10;
  int max_depth = 100;
  long long max_evals = 8000000;
  // acceptance floor relative to the local magnitude; absolute tolerances
  // below the roundoff of a large integrand would otherwise never be met
  double rel_floor = 1e-14;
};

struct QuadResult {
  Cplx value{0.0, 0.0};
  double err = 0.0;
  long long evals = 0;
};

namespace detail {

struct GaussRule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

// Legendre nodes by Newton iteration; full double precision.
inline GaussRule make_gauss_rule(int n) {
  GaussRule r;
  r.nodes.resize(size_t(n));
  r.weights.resize(size_t(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[size_t(i)] = x;
    r.weights[size_t(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

inline const GaussRule& gauss15() {
  static const GaussRule r = make_gauss_rule(15);
  return r;
}

inline const GaussRule& gauss20() {
  static const GaussRule r = make_gauss_rule(20);
  return r;
}

template <class F>
Cplx gauss_apply(const GaussRule& r, const F& f, double a, double b, long long& evals) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  Cplx acc(0.0);
  for (size_t i = 0; i < r.nodes.size(); ++i) {
    acc += r.weights[i] * f(mid + half * r.nodes[i]);
    ++evals;
  }
  return acc * half;
}

inline const GaussRule& gauss7() {
  static const GaussRule r = make_gauss_rule(7);
  return r;
}

struct Segment {
  double a, b;
  Cplx value;
  double err;
};

// Globally adaptive: always refine the segment with the worst error estimate
// (|GL15 - GL7|). Singular-corner contributions shrink geometrically under
// bisection, so the queue terminates in O(log 1/tol) splits there instead of
// exhausting a per-branch budget. Deterministic: ties resolved by position.
template <class F>
QuadResult global_adaptive(const F& f, const std::vector<double>& pts, const QuadOptions& opt) {
  QuadResult out;
  auto make_segment = [&](double a, double b) {
    Segment s;
    s.a = a;
    s.b = b;
    s.value = gauss_apply(gauss15(), f, a, b, out.evals);
    const Cplx coarse = gauss_apply(gauss7(), f, a, b, out.evals);
    s.err = std::abs(s.value - coarse);
    return s;
  };
  auto worse = [](const Segment& x, const Segment& y) {
    if (x.err != y.err) return x.err < y.err;  // max-heap on error
    return x.a > y.a;
  };
  std::vector<Segment> heap;
  double total_err = 0.0;
  Cplx total(0.0);
  for (size_t i = 0; i + 1 < pts.size(); ++i)
    if (pts[i] < pts[i + 1]) {
      heap.push_back(make_segment(pts[i], pts[i + 1]));
      total_err += heap.back().err;
      total += heap.back().value;
    }
  std::make_heap(heap.begin(), heap.end(), worse);

  const int max_segments = 4000;
  while (int(heap.size()) < max_segments && out.evals < opt.max_evals) {
    if (total_err <= std::max(opt.abs_tol, opt.rel_floor * std::abs(total))) break;
    std::pop_heap(heap.begin(), heap.end(), worse);
    Segment top = heap.back();
    heap.pop_back();
    total_err -= top.err;
    total -= top.value;
    if (top.b - top.a < 1e-15 * (std::abs(top.a) + std::abs(top.b) + 1e-300)) {
      // cannot split further in double precision; keep the segment and its
      // unresolved error estimate so divergence is reported, not hidden
      total_err += top.err;
      total += top.value;
      heap.push_back(top);
      std::push_heap(heap.begin(), heap.end(), worse);
      break;
    }
    const double mid = 0.5 * (top.a + top.b);
    for (double edge : {top.a, mid}) {
      heap.push_back(make_segment(edge, edge == top.a ? mid : top.b));
      total_err += heap.back().err;
      total += heap.back().value;
      std::push_heap(heap.begin(), heap.end(), worse);
    }
  }
  // fixed summation order for deterministic reductions
  std::sort(heap.begin(), heap.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
  for (const auto& s : heap) {
    out.value += s.value;
    out.err += s.err;
  }
  const bool finite = std::isfinite(out.value.real()) && std::isfinite(out.value.imag()) &&
                      std::isfinite(out.err);
  if (!finite || out.err > std::max(50.0 * opt.abs_tol, 1e-11 * std::abs(out.value)))
    throw AccuracyError("quadrature failed to converge", out.value, out.err);
  return out;
}

}  // namespace detail

/* Adaptive Gauss-Legendre with interval bisection; the local budget halves on
   each split, so integrable endpoint singularities (t^theta with theta > -1,
   log) drain the budget exactly where they need it. Evaluation order is fixed
   (depth-first, left to right), so results are deterministic. Throws
   AccuracyError with the best estimate when the bisection depth runs out well
   before the tolerance is met. The caller is responsible for passing bounds
   (or breakpoints) commensurate with the integrand's features; supports are
   clipped upstream. */
template <class F>
QuadResult integrate(const F& f, double lo, double hi, const QuadOptions& opt = {})
  requires std::is_invocable_r_v<Cplx, F, double>
{
  QuadResult out;
  if (!(lo < hi)) return out;
  // a mild pre-split keeps moderately narrow features visible to the rule
  std::vector<double> pts;
  for (int i = 0; i <= 4; ++i) pts.push_back(lo + (hi - lo) * i / 4.0);
  return detail::global_adaptive(f, pts, opt);
}

inline QuadResult integrate(const Fn1& f, double lo, double hi, const QuadOptions& opt = {}) {
  Interval s = Interval::intersect(f.support(), {lo, hi});
  if (s.empty()) return {};
  return integrate([&f](double x) { return f.value(x); }, s.lo, s.hi, opt);
}

// Integrate across explicit breakpoints (features the caller knows about).
inline QuadResult integrate_segmented(const std::function<Cplx(double)>& f,
                                      const std::vector<double>& pts,
                                      const QuadOptions& opt = {}) {
  if (pts.size() < 2) return {};
  return detail::global_adaptive(f, pts, opt);
}

inline constexpr double kTailWindowEnd = 1e3;  // finite quadrature window ends here

// Geometric panel boundaries from lo up to hi; keeps features at every scale
// visible to the panel rule regardless of where they sit.
inline std::vector<double> geometric_breakpoints(double lo, double hi, double first = 1e-9) {
  std::vector<double> pts;
  pts.push_back(lo);
  double step = std::max(first, 1e-12 * (hi - lo));
  double x = lo + step;
  while (x < hi) {
    pts.push_back(x);
    step *= 2.0;
    x = lo + step;
  }
  pts.push_back(hi);
  return pts;
}

struct TailFit {
  Cplx amplitude{0.0, 0.0};
  double exponent = 0.0;
  bool zero = false;
};

/* Fit f ~ A s^theta from samples on [S, 2.2 S]. The declared exponent is the
   certificate the caller carries (weak-homogeneity bookkeeping); the fit must
   reproduce a power law within 5% and must not decay slower than the declared
   bound allows. Exactly vanishing tails (compactly supported integrands) are
   detected and shortcut. */
inline TailFit fit_power_tail(const std::function<Cplx(double)>& f, double S,
                              double declared_exponent, double zero_floor) {
  static const double rel[] = {1.0, 1.3, 1.69, 2.197};
  Cplx vals[4];
  double amax = 0.0;
  for (int i = 0; i < 4; ++i) {
    vals[i] = f(S * rel[i]);
    amax = std::max(amax, std::abs(vals[i]));
  }
  TailFit fit;
  if (amax <= zero_floor) {
    fit.zero = true;
    return fit;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < 4; ++i) {
    const double x = std::log(S * rel[i]);
    const double y = std::log(std::abs(vals[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (4.0 * sxy - sx * sy) / (4.0 * sxx - sx * sx);
  fit.exponent = slope;
  fit.amplitude = vals[0] / std::pow(S, slope);
  double spread = 0.0;
  for (int i = 1; i < 4; ++i) {
    const Cplx pred = fit.amplitude * std::pow(S * rel[i], slope);
    spread = std::max(spread, std::abs(vals[i] - pred) / amax);
  }
  if (spread > 0.05)
    throw TailFitError("integrand does not follow a power law beyond the quadrature window",
                       slope, spread);
  if (slope > declared_exponent + 0.25)
    throw TailFitError("fitted tail decays slower than the certified exponent allows", slope,
                       spread);
  if (slope >= -1.0 - 1e-9)
    throw TailFitError("fitted tail exponent is not integrable at infinity", slope, spread);
  return fit;
}

/* Integral over [lo, inf): geometric panels up to the window end plus an
   analytic power-law tail validated against the declared exponent. */
inline QuadResult integrate_halfline(const std::function<Cplx(double)>& f, double lo,
                                     double declared_tail_exponent, const QuadOptions& opt = {}) {
  QuadResult main = integrate_segmented(f, geometric_breakpoints(lo, kTailWindowEnd), opt);
  TailFit tail = fit_power_tail(f, kTailWindowEnd, declared_tail_exponent, opt.abs_tol * 1e-6);
  main.evals += 4;
  if (!tail.zero) {
    // int_S^inf A s^theta ds = -A S^{theta+1}/(theta+1)
    const Cplx t = -tail.amplitude * std::pow(kTailWindowEnd, tail.exponent + 1.0) /
                   (tail.exponent + 1.0);
    main.value += t;
    main.err += 0.05 * std::abs(t);
  }
  return main;
}

// Half-line integral of a compactly supported Fn1: no tail machinery needed.
inline QuadResult integrate_halfline(const Fn1& f, double lo, double declared_tail_exponent,
                                     const QuadOptions& opt = {}) {
  Interval s = f.support();
  if (std::isfinite(s.hi)) {
    Interval clip = Interval::intersect(s, {lo, kTailWindowEnd * 1e6});
    if (clip.empty()) return {};
    return integrate([&f](double x) { return f.value(x); }, clip.lo, clip.hi, opt);
  }
  return integrate_halfline([&f](double x) { return f.value(x); }, std::max(lo, s.lo),
                            declared_tail_exponent, opt);
}

}  // namespace homext
