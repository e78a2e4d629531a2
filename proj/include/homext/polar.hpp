#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "homext/dist1d.hpp"
#include "homext/oracle.hpp"
#include "homext/zoom.hpp"

namespace homext {

/* Polar factorization of zoom-homogeneous distributions on (R^n \ 0) x R and
   the two extension engines across the singular fiber X = 0.

   With u alpha-homogeneous of degree a, in polar coordinates X = r omega,

     <u, f (x) g> = int_0^inf s^(a-1) f(s) <w, g(., ./s)> ds

   for a trace w on S^{n-1} x R, extracted as

     w(g) = <u, (X,t) -> rho(1/|X|) |X|^(-a) g(X/|X|, |X| t)>

   with rho an averaging weight (int rho/s ds = 1); the oracle carries its
   own integration measure, so no polar Jacobian appears here. The canonical
   extension to r = 0 integrates the radial variable from infinity k times,
   k = -floor(c + Re a) when c + Re a <= 0 (and 0 otherwise, the Riemann
   case), where c is the trace's certified gamma weak degree. It exists iff
   c + Re a is not in {0,-1,-2,...}. */

// Tensor test function on R_+ x S^{n-1} x R.
struct PolarTensorFn {
  TestFn f;        // radial factor; may be nonzero at r = 0
  SphereLineFn g;  // sphere-cross-line factor

  // composition with alpha at s^{-1}: f(r/s) (x) g(omega, s t)
  PolarTensorFn alpha_pullback(double s) const { return {f.scaled_arg(1.0 / s), g.scale_t(s)}; }

  // the same function read on R^n x R: f(|X|) g(X/|X|, t)
  ModelSliceFn to_cartesian(int n) const {
    ModelSliceFn m;
    m.n = n;
    const double rhi = std::max(std::abs(f.support().lo), std::abs(f.support().hi));
    m.x_box.assign(size_t(n), Interval{-rhi, rhi});
    m.r_window = Interval{std::max(0.0, f.support().lo), rhi};
    m.t_bound = g.t_support();
    auto fc = std::make_shared<TestFn>(f);
    auto gc = std::make_shared<SphereLineFn>(g);
    m.slice = [fc, gc, n](const Vec& X) {
      double r2 = 0.0;
      for (int i = 0; i < n; ++i) r2 += X[size_t(i)] * X[size_t(i)];
      const double r = std::sqrt(r2);
      const Cplx fr = fc->value(r);
      if (fr == Cplx(0.0) || r == 0.0) return Fn1();
      Vec om(size_t(n), 0.0);
      for (int i = 0; i < n; ++i) om[size_t(i)] = X[size_t(i)] / r;
      return gc->t_slice(om).scaled(fr);
    };
    return m;
  }
};

struct PolarTrace {
  TraceOracle w;
  RationalDegree c;  // declared E_gamma^c weak degree of the trace
  bool certified = false;
};

struct PolarOptions {
  double tol = 1e-9;        // pairing quadrature tolerance
  double probe_tol = 1e-7;  // homogeneity probe tolerance
  int probes = 10;
  std::uint64_t seed = 1234;
  int cert_probes = 8;
  int cert_per_decade = 33;
};

// Deterministic probe family on the sphere-cross-line: low harmonics tensored
// with seeded bumps in t.
inline std::vector<SphereLineFn> trace_probes(int n, int count, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<SphereLineFn> out;
  for (int i = 0; i < count; ++i) {
    const int mode = i % 3;
    SphereLineFn::SphereFactor om;
    if (mode == 0)
      om = [](const Vec&) { return Cplx(1.0); };
    else if (mode == 1)
      om = [](const Vec& w) { return Cplx(1.0 + 0.5 * w[0]); };
    else
      om = [n](const Vec& w) { return Cplx(n >= 2 ? 1.0 + 0.5 * w[1] : 1.0 - 0.5 * w[0]); };
    out.push_back(SphereLineFn::tensor(n, om, random_bump(rng)));
  }
  return out;
}

// Grid certificate that w lies in E_gamma^c: |<w, g(., ./s)>| <= C(g) s^c
// for all s > 0, checked on the standard log grid.
inline WeakDegreeReport certify_trace_degree(const TraceOracle& w, double c,
                                             const PolarOptions& opt = {}) {
  std::vector<SphereLineFn> probes = trace_probes(w.dim(), opt.cert_probes, opt.seed + 7);
  std::vector<double> grid = log_grid(1e-3, 1e3, opt.cert_per_decade);
  auto pair_at = [&](int p, double s) {
    return w.pair(probes[size_t(p)].scale_t(1.0 / s)).value;
  };
  return detail::band_certify(pair_at, c, /*all_positive=*/true, grid, opt.cert_probes);
}

inline PolarTrace make_certified_trace(TraceOracle w, RationalDegree c,
                                       const PolarOptions& opt = {}) {
  PolarTrace tr{std::move(w), c, false};
  WeakDegreeReport rep = certify_trace_degree(tr.w, c.real(), opt);
  if (!rep.holds)
    throw NotHomogeneousError("declared trace weak degree failed grid certification",
                              rep.worst_ratio);
  tr.certified = true;
  return tr;
}

/* Trace extraction. Probe-checks alpha-homogeneity of u at degree a first
   (probes supported off X = 0), then realizes the extraction pairing through
   u's general-slice interface. */
inline PolarTrace extract_trace(const ModelOracle& u, const RationalDegree& a,
                                const AveragingWeight& rho, const RationalDegree& declared_c,
                                const PolarOptions& opt = {}) {
  const int n = u.dim();
  if (!u.has_general())
    throw PreconditionError("trace extraction needs a distribution with general-slice pairing");
  SeededRng rng(opt.seed);
  std::vector<ProductTestFn> probes;
  for (int i = 0; i < opt.probes; ++i) probes.push_back(random_punctured_probe(rng, n));
  DefectSweep sweep =
      homogeneity_sweep(u, a.value(), ActionKind::alpha, probes, {0.25, 0.5, 2.0, 4.0});
  if (sweep.max_normalized_defect > opt.probe_tol)
    throw NotHomogeneousError("distribution is not alpha-homogeneous at the declared degree",
                              sweep.max_normalized_defect);

  const Interval rho_sup = rho.support();
  const Cplx av = a.value();
  TestFn rho_fn = rho.rho();
  auto pair = [u, n, rho_fn, rho_sup, av](const SphereSliceFn& G) -> Pairing {
    ModelSliceFn arg;
    arg.n = n;
    arg.x_box.assign(size_t(n), Interval{-rho_sup.hi, rho_sup.hi});
    arg.r_window = rho_sup;  // the weight rho(1/|X|) vanishes off this shell
    arg.t_bound = Interval::all();
    auto slice = G.slice;
    arg.slice = [slice, rho_fn, av, n](const Vec& X) -> Fn1 {
      double r2 = 0.0;
      for (int i = 0; i < n; ++i) r2 += X[size_t(i)] * X[size_t(i)];
      const double r = std::sqrt(r2);
      const Cplx weight = rho_fn.value(1.0 / r);
      if (r <= 0.0 || weight == Cplx(0.0)) return Fn1();
      Vec om(size_t(n), 0.0);
      for (int i = 0; i < n; ++i) om[size_t(i)] = X[size_t(i)] / r;
      // g(omega, r t) scaled by rho(1/r) r^{-a}
      return slice(om).scaled_arg(r).scaled(weight * std::pow(Cplx(r), -av));
    };
    return u.pair(arg);
  };
  return PolarTrace{TraceOracle(n, pair), declared_c, false};
}

/* The factorization pairing on the punctured space:
   <u, f (x) g> = int s^(a-1) f(s) <w, g(., ./s)> ds, supp f in (0, inf). */
inline Pairing reconstruct(const PolarTrace& tr, const RationalDegree& a, const TestFn& f,
                           const SphereLineFn& g, const PolarOptions& opt = {}) {
  Interval fs = f.support();
  if (f.is_zero()) return {};
  if (!(fs.lo > 0.0))
    throw PreconditionError(
        "radial factor touches r = 0; use the canonical extension for such pairings");
  const Cplx av = a.value();
  double inner_err = 0.0;
  auto integrand = [&](double s) -> Cplx {
    Pairing W = tr.w.pair(g.scale_t(1.0 / s));
    inner_err = std::max(inner_err, W.err);
    return std::pow(Cplx(s), av - 1.0) * f.value(s) * W.value;
  };
  QuadOptions qopt;
  qopt.abs_tol = opt.tol;
  QuadResult q = integrate(integrand, fs.lo, fs.hi, qopt);
  return {q.value, q.err + inner_err * (fs.hi - fs.lo)};
}

// The reconstructed distribution as an oracle on the punctured model space.
inline ModelOracle reconstruct_oracle(const PolarTrace& tr, const RationalDegree& a,
                                      const PolarOptions& opt = {}) {
  const int n = tr.w.dim();
  const Cplx av = a.value();
  TraceOracle w = tr.w;
  auto pair = [w, av, n, opt](const ModelSliceFn& F) -> Pairing {
    const double r_hi = std::min(detail::box_outer_radius(F.x_box), F.r_window.hi);
    const double r_lo = std::max(detail::box_inner_radius(F.x_box), F.r_window.lo);
    if (!(r_lo > 0.0))
      throw PreconditionError(
          "reconstructed distribution lives on the punctured space; "
          "test support must avoid X = 0");
    auto slice = F.slice;
    double inner_err = 0.0;
    auto integrand = [&](double s) -> Cplx {
      SphereSliceFn G;
      G.n = n;
      G.slice = [slice, s, n](const Vec& om) {
        Vec X(size_t(n), 0.0);
        for (int i = 0; i < n; ++i) X[size_t(i)] = s * om[size_t(i)];
        return slice(X).scaled_arg(1.0 / s);
      };
      Pairing W = w.pair(G);
      inner_err = std::max(inner_err, W.err);
      return std::pow(Cplx(s), av - 1.0) * W.value;
    };
    QuadOptions qopt;
    qopt.abs_tol = opt.tol;
    QuadResult q = integrate(integrand, r_lo, r_hi, qopt);
    return Pairing{q.value, q.err + inner_err * (r_hi - r_lo)};
  };
  return ModelOracle::from_slices(n, pair);
}

struct RegularizationDepth {
  int k = 0;
  static RegularizationDepth for_degrees(const RationalDegree& c, const RationalDegree& a) {
    const double sum = c.real() + a.real();
    RegularizationDepth d;
    d.k = sum > 0.0 ? 0 : -int(std::floor(sum));
    return d;
  }
};

namespace detail {

/* Iterated integrals from infinity over the radial variable:
   I_0 = H, I_j(s) = int_inf^s I_{j-1}(t) dt. Panel-cached on a geometric
   grid up to the quadrature window end, with analytic power tails beyond it:
   if H ~ A t^theta out there, then I_j ~ A_j t^(theta+j) with
   A_j = A_{j-1}/(theta+j). Integrating from infinity at every level is what
   keeps the resulting extension exactly homogeneous. */
class IteratedFromInfinity {
 public:
  IteratedFromInfinity(std::function<Cplx(double)> H, int levels, double declared_theta,
                       double tol)
      : H_(std::move(H)), levels_(levels), tol_(tol) {
    bnds_.push_back(0.0);
    for (double b = 1e-6; b < kTailWindowEnd; b *= 1.6) bnds_.push_back(b);
    bnds_.push_back(kTailWindowEnd);

    TailFit fit = fit_power_tail(H_, kTailWindowEnd, declared_theta, tol_ * 1e-4);
    theta_ = fit.zero ? declared_theta : fit.exponent;
    tail_amp_.assign(size_t(levels) + 1, Cplx(0.0));
    tail_amp_[0] = fit.zero ? Cplx(0.0) : fit.amplitude;
    for (int j = 1; j <= levels; ++j) {
      const double power = theta_ + double(j);
      if (std::abs(tail_amp_[size_t(j) - 1]) > 0.0 && !(power < 0.0))
        throw TailFitError("iterated tail fails to vanish at infinity", theta_, 0.0);
      tail_amp_[size_t(j)] = tail_amp_[size_t(j) - 1] / power;
    }

    // Level-0 tail taken exactly (u = 1/t substitution); the fitted power
    // law only models deeper levels, where the traces that reach them have
    // exact power tails. This keeps forced-depth values bias-free.
    if (fit.zero) {
      tail0_ = Cplx(0.0);
    } else {
      QuadOptions topt;
      topt.abs_tol = tol_;
      tail0_ = integrate([this](double v) { return H_(1.0 / v) / (v * v); }, 0.0,
                         1.0 / kTailWindowEnd, topt)
                   .value;
    }

    // Power behaviour of H below the first panel edge; integrated exactly
    // through the levels so that evaluations near s = 0 stay O(1).
    fit_low_end(declared_theta);

    panel_.resize(size_t(levels) + 1);
    suffix_.resize(size_t(levels) + 1);
    low_model_.resize(size_t(levels) + 1);
    low_model_[0] = low_h_model_;
    for (int j = 1; j <= levels; ++j) {
      build_level(j);
      build_low_model(j);
    }
  }

  // I_level(s) for s > 0
  Cplx eval(int level, double s) const {
    if (level == 0) return H_(s);
    if (s >= kTailWindowEnd)
      return tail_amp_[size_t(level)] * std::pow(s, theta_ + double(level));
    if (s < bnds_[1]) return eval_model(level, s);
    const size_t p = panel_index(s);
    // I_level(s) = -( tail_int(level-1) + int_s^S I_{level-1} )
    Cplx partial = partial_panel(level - 1, s, bnds_[p + 1]);
    return -(tail_integral(level - 1) + partial + suffix_[size_t(level)][p + 1]);
  }

  // I_level(0); finite only when theta + level > 0, which is the only regime
  // where the boundary corrections that need it are requested
  Cplx at_zero(int level) const {
    Cplx first(0.0);
    for (const auto& [c, e] : low_model_[size_t(level) - 1]) {
      if (!(e + 1.0 > 0.0))
        throw PreconditionError("boundary value requested for a divergent iterate");
      first += c * std::pow(bnds_[1], e + 1.0) / (e + 1.0);
    }
    return -(tail_integral(level - 1) + first + suffix_[size_t(level)][1]);
  }

 private:
  using PowerModel = std::vector<std::pair<Cplx, double>>;  // sum of c s^e terms

  void fit_low_end(double declared_theta) {
    const double b1 = bnds_[1];
    static const double rel[] = {1.0, 0.75, 0.5625, 0.421875};
    Cplx vals[4];
    double amax = 0.0;
    for (int i = 0; i < 4; ++i) {
      vals[i] = H_(b1 * rel[i]);
      amax = std::max(amax, std::abs(vals[i]));
    }
    if (amax <= tol_ * 1e-4) return;  // H vanishes toward 0
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < 4; ++i) {
      const double x = std::log(b1 * rel[i]);
      const double y = std::log(std::abs(vals[i]));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (4.0 * sxy - sx * sy) / (4.0 * sxx - sx * sx);
    const Cplx amp = vals[0] / std::pow(b1, slope);
    double spread = 0.0;
    for (int i = 1; i < 4; ++i)
      spread = std::max(spread,
                        std::abs(vals[i] - amp * std::pow(b1 * rel[i], slope)) / amax);
    if (spread > 0.05)
      throw TailFitError("integrand does not follow a power law toward the base", slope, spread);
    if (slope < declared_theta - 0.25)
      throw TailFitError("low-end exponent is below what the certificate allows", slope, spread);
    low_h_model_ = {{amp, slope}};
  }

  // integrate the level-(j-1) low-end model exactly from b1 down
  void build_low_model(int j) {
    const double b1 = bnds_[1];
    const Cplx at_b1 = [&] {
      Cplx partial = partial_panel(j - 1, b1, bnds_[2]);
      return -(tail_integral(j - 1) + partial + suffix_[size_t(j)][2]);
    }();
    PowerModel next;
    Cplx c0 = at_b1;
    for (const auto& [c, e] : low_model_[size_t(j) - 1]) {
      // I_j(s) = I_j(b1) - int_s^{b1} I_{j-1} = const + c s^{e+1}/(e+1) terms
      c0 -= c * std::pow(b1, e + 1.0) / (e + 1.0);
      next.push_back({c / (e + 1.0), e + 1.0});
    }
    next.push_back({c0, 0.0});
    low_model_[size_t(j)] = std::move(next);
  }

  Cplx eval_model(int level, double s) const {
    Cplx acc(0.0);
    for (const auto& [c, e] : low_model_[size_t(level)])
      acc += c * (e == 0.0 ? Cplx(1.0) : std::pow(Cplx(s), e));
    return acc;
  }

  void build_level(int j) {
    const size_t P = bnds_.size() - 1;  // panel count
    auto& panels = panel_[size_t(j)];
    panels.assign(P, Cplx(0.0));
    // panel 0 is covered by the low-end model; never integrated directly
    for (size_t p = 1; p < P; ++p)
      panels[p] = gauss_apply(
          gauss20(), [this, j](double t) { return eval(j - 1, t); }, bnds_[p], bnds_[p + 1],
          evals_);
    auto& suf = suffix_[size_t(j)];
    suf.assign(P + 1, Cplx(0.0));
    for (size_t p = P; p-- > 1;) suf[p] = suf[p + 1] + panels[p];
  }

  size_t panel_index(double s) const {
    size_t lo = 0, hi = bnds_.size() - 2;
    while (lo < hi) {
      const size_t mid = (lo + hi + 1) / 2;
      if (bnds_[mid] <= s)
        lo = mid;
      else
        hi = mid - 1;
    }
    return lo;
  }

  // partial integral within one geometric panel; integrands are smooth there
  Cplx partial_panel(int level, double a, double b) const {
    if (!(a < b)) return Cplx(0.0);
    long long ev = 0;
    return gauss_apply(gauss20(), [this, level](double t) { return eval(level, t); }, a, b, ev);
  }

  // int_S^inf I_level; exact quadrature at level 0, power model deeper
  Cplx tail_integral(int level) const {
    if (level == 0) return tail0_;
    const Cplx A = tail_amp_[size_t(level)];
    if (A == Cplx(0.0)) return Cplx(0.0);
    const double power = theta_ + double(level) + 1.0;
    return -A * std::pow(kTailWindowEnd, power) / power;
  }

  std::function<Cplx(double)> H_;
  int levels_;
  double tol_;
  double theta_ = 0.0;
  Cplx tail0_{0.0, 0.0};
  PowerModel low_h_model_;
  std::vector<PowerModel> low_model_;
  std::vector<double> bnds_;
  std::vector<Cplx> tail_amp_;
  std::vector<std::vector<Cplx>> panel_;   // panel_[j][p] = int_{b_p}^{b_{p+1}} I_{j-1}
  std::vector<std::vector<Cplx>> suffix_;  // suffix_[j][p] = int_{b_p}^{S} I_{j-1}
  mutable long long evals_ = 0;
};

}  // namespace detail

/* Canonical extension pairing. Direct Riemann integral when c + Re a > 0;
   otherwise the k-fold iterated-from-infinity formula

     <u~, f (x) g> = (-1)^k int_0^inf f^(k)(s) I_k(s) ds.

   Forcing a depth K above the natural one changes the functional by exact
   integration-by-parts boundary terms (-1)^j f^(j)(0) I_{j+1}(0); those are
   subtracted back so that forced depths are value-preserving. The forbidden
   set c + Re a in -N has no extension at all and is refused. */
class CanonicalExtension {
 public:
  CanonicalExtension(PolarTrace trace, RationalDegree a, PolarOptions opt = {})
      : tr_(std::move(trace)), a_(a), opt_(opt) {
    // exact-arithmetic admissibility first; certification is quadrature-heavy
    forbidden_check(tr_.c, a_);
    if (!tr_.certified) tr_ = make_certified_trace(tr_.w, tr_.c, opt_);
    k_ = RegularizationDepth::for_degrees(tr_.c, a_).k;
  }

  static void forbidden_check(const RationalDegree& c, const RationalDegree& a) {
    if (c.exact && a.exact) {
      Rational sum = c.rat + a.rat;
      if (sum.is_nonpositive_integer())
        throw ForbiddenDegreeError(
            "no canonical extension exists: c + Re a lies in {0,-1,-2,...}", sum.to_double());
    } else {
      const double sum = c.real() + a.real();
      if (sum <= 1e-9 && std::abs(sum - std::round(sum)) < 1e-9)
        throw ForbiddenDegreeError(
            "no canonical extension exists: c + Re a lies in {0,-1,-2,...}", sum);
    }
  }

  int natural_depth() const { return k_; }
  const RationalDegree& degree() const { return a_; }
  const PolarTrace& trace() const { return tr_; }

  Pairing pair(const TestFn& f, const SphereLineFn& g, int forced_depth = -1) const {
    const int K = forced_depth < 0 ? k_ : forced_depth;
    if (K < k_) throw PreconditionError("forced depth below the convergent minimum");
    Interval fs = Interval::intersect(f.support(), {0.0, std::numeric_limits<double>::infinity()});
    if (f.is_zero() || fs.empty()) return {};
    const Cplx av = a_.value();
    const double theta = tr_.c.real() + a_.real() - 1.0;

    double inner_err = 0.0;
    TraceOracle w = tr_.w;
    auto H = [w, g, av, &inner_err](double s) -> Cplx {
      Pairing W = w.pair(g.scale_t(1.0 / s));
      inner_err = std::max(inner_err, W.err);
      return std::pow(Cplx(s), av - 1.0) * W.value;
    };

    QuadOptions qopt;
    qopt.abs_tol = opt_.tol;
    if (K == 0) {
      QuadResult q = integrate([&](double s) { return H(s) * f.value(s); },
                               std::max(0.0, fs.lo), fs.hi, qopt);
      return {q.value, q.err + inner_err * fs.hi};
    }

    detail::IteratedFromInfinity iter(H, K, theta, opt_.tol);
    Fn1 fk = Fn1::from(f).derivative_fn(K);
    QuadResult q = integrate(
        [&](double s) { return fk.value(s) * iter.eval(K, s); }, std::max(0.0, fs.lo), fs.hi,
        qopt);
    Cplx value = (K % 2 == 0 ? 1.0 : -1.0) * q.value;
    // value-preserving boundary corrections when forcing past the natural depth
    Fn1 fj = Fn1::from(f);
    for (int j = k_; j < K; ++j) {
      const Cplx fj0 = fj.derivative(0.0, j);
      if (fj0 != Cplx(0.0)) {
        const Cplx corr = (j % 2 == 0 ? 1.0 : -1.0) * fj0 * iter.at_zero(j + 1);
        value -= corr;
      }
    }
    return {value, q.err + inner_err * fs.hi};
  }

 private:
  PolarTrace tr_;
  RationalDegree a_;
  PolarOptions opt_;
  int k_ = 0;
};

inline Pairing canonical_extend(const PolarTrace& tr, const RationalDegree& a, const TestFn& f,
                                const SphereLineFn& g, const PolarOptions& opt = {}) {
  return CanonicalExtension(tr, a, opt).pair(f, g);
}

// alpha-homogeneity defect of an extension on a polar tensor probe.
inline Cplx extension_defect(const CanonicalExtension& ext, const PolarTensorFn& probe,
                             double s) {
  PolarTensorFn pulled = probe.alpha_pullback(s);
  const Cplx lhs = ext.pair(pulled.f, pulled.g).value;
  const Cplx rhs = ext.pair(probe.f, probe.g).value;
  return lhs - std::pow(Cplx(s), ext.degree().value()) * rhs;
}

/* Smooth ramp: 0 below lo, 1 above hi, monotone in between;
   psi(u) = exp(-1/u) glue. Closed form, jets by composition. */
struct SmoothRamp {
  double lo = 1.0, hi = 2.0;

  double value(double x) const {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    const double u = (x - lo) / (hi - lo);
    const double pa = psi(u), pb = psi(1.0 - u);
    return pa / (pa + pb);
  }

  Jet jet(const Jet& x) const {
    const double xv = x.value().real();
    const int order = x.order();
    if (xv <= lo + 1e-4 * (hi - lo)) return Jet(order);
    if (xv >= hi - 1e-4 * (hi - lo))
      return Jet::constant(Cplx(1.0), order);
    Jet u = (x - Cplx(lo)) * Cplx(1.0 / (hi - lo));
    Jet pa = exp(Cplx(-1.0) / u);
    Jet pb = exp(Cplx(-1.0) / (Cplx(1.0) - u));
    return pa / (pa + pb);
  }

 private:
  static double psi(double u) { return u > 1e-6 ? std::exp(-1.0 / u) : 0.0; }
};

struct CutoffLimitOptions {
  double tol = 1e-8;  // Cauchy tolerance on the extrapolated limit; the
                      // effective floor also tracks the pairing error estimates
  int max_doublings = 24;
  SmoothRamp ramp{1.0, 2.0};
};

struct CutoffLimitResult {
  Cplx value{0.0, 0.0};
  double err = 0.0;
  int doublings = 0;  // converged at m = 2^doublings
};

/* Locally integrable extension: u~ = lim_m chi(m |t X|) u with chi a ramp
   vanishing near 0 and equal to 1 at infinity, so chi_m -> 1 off the singular
   set {tX = 0}. Successive m-values converge geometrically at a rate set by
   the weak degree; the limit is taken with geometric-tail extrapolation and a
   Cauchy test on the extrapolated values. Requires b > 0 and b - Re a > 0
   (certified by the caller on the grid). */
inline CutoffLimitResult locally_integrable_extend(const ModelOracle& u, const RationalDegree& a,
                                                   double b_window, const ModelSliceFn& phi,
                                                   const CutoffLimitOptions& opt = {}) {
  if (!(b_window > 0.0) || !(b_window - a.real() > 0.0))
    throw PreconditionError("cutoff-limit extension needs b > 0 and b - Re a > 0");
  if (!u.has_general())
    throw PreconditionError("cutoff-limit extension needs general-slice pairing");

  const int n = u.dim();
  auto cut_pair = [&](double m) -> Pairing {
    ModelSliceFn arg = phi;
    auto slice = phi.slice;
    SmoothRamp ramp = opt.ramp;
    arg.slice = [slice, m, ramp, n](const Vec& X) -> Fn1 {
      Fn1 base = slice(X);
      if (base.is_zero()) return base;
      double r2 = 0.0;
      for (int i = 0; i < n; ++i) r2 += X[size_t(i)] * X[size_t(i)];
      const double mr = m * std::sqrt(r2);
      if (mr == 0.0) return Fn1();
      Interval bs = base.support();
      // chi(m |X| |t|) factor, exactly zero where the ramp vanishes
      Fn1 chi(
          [ramp, mr](double t, int order) {
            Jet tt = Jet::variable(t, order);
            if (t < 0.0) tt = -tt;
            return ramp.jet(tt * Cplx(mr));
          },
          [ramp, mr](double t) { return Cplx(ramp.value(mr * std::abs(t))); },
          Interval::all());
      const double gap = ramp.lo / mr;  // chi_m vanishes on |t| <= gap
      if (bs.lo > -gap && bs.hi < gap) return Fn1();
      return chi * base;
    };
    return u.pair(arg);
  };

  // The raw sequence converges geometrically (ratio set by the weak degree);
  // iterated Shanks transforms strip the leading geometric layers so the
  // Cauchy test lands within the doubling budget.
  auto shanks_best = [](const std::vector<Cplx>& v) {
    std::vector<Cplx> row = v;
    for (int lvl = 0; lvl < 3 && row.size() >= 3; ++lvl) {
      std::vector<Cplx> nxt;
      for (size_t i = 0; i + 2 < row.size(); ++i) {
        const Cplx d1 = row[i + 1] - row[i];
        const Cplx d2 = row[i + 2] - row[i + 1];
        const Cplx dd = d2 - d1;
        if (std::abs(dd) <= 1e-13 * (1.0 + std::abs(row[i + 2])))
          nxt.push_back(row[i + 2]);
        else
          nxt.push_back(row[i + 2] - d2 * d2 / dd);
      }
      row = std::move(nxt);
    }
    return row.back();
  };

  std::vector<Cplx> vals;
  CutoffLimitResult out;
  Cplx prev_best(0.0);
  bool have_prev = false;
  for (int j = 0; j <= opt.max_doublings; ++j) {
    Pairing p = cut_pair(std::pow(2.0, j));
    out.err = std::max(out.err, p.err);
    vals.push_back(p.value);
    out.doublings = j;
    const double floor = std::max(opt.tol, 30.0 * out.err);
    if (vals.size() >= 2) {
      const Cplx draw = vals[vals.size() - 1] - vals[vals.size() - 2];
      const double scale = 1.0 + std::abs(vals.back());
      // exact finite-m convergence (test support off the singular set)
      if (std::abs(draw) <= opt.tol * scale) {
        out.value = vals.back();
        return out;
      }
    }
    if (vals.size() >= 4) {
      // gate the extrapolation on measured contraction of the raw sequence:
      // Shanks would otherwise happily sum a divergent geometric sequence to
      // its anti-limit, masking a wrong weak-degree certificate
      const Cplx d1 = vals[vals.size() - 2] - vals[vals.size() - 3];
      const Cplx d2 = vals[vals.size() - 1] - vals[vals.size() - 2];
      if (std::abs(d1) > 0.0 && std::abs(d2) >= 0.98 * std::abs(d1)) {
        have_prev = false;
        continue;
      }
      const Cplx best = shanks_best(vals);
      const double scale = 1.0 + std::abs(best);
      if (have_prev && std::abs(best - prev_best) <= floor * scale) {
        out.value = best;
        return out;
      }
      prev_best = best;
      have_prev = true;
    }
  }
  throw AccuracyError(
      "cutoff limit failed to converge by m = 2^" + std::to_string(opt.max_doublings) +
          "; the weak-degree certificate is inconsistent with this distribution",
      vals.back(), std::abs(vals.back() - vals[vals.size() - 2]));
}

inline CutoffLimitResult locally_integrable_extend(const ModelOracle& u, const RationalDegree& a,
                                                   double b_window, const ProductTestFn& phi,
                                                   const CutoffLimitOptions& opt = {}) {
  return locally_integrable_extend(u, a, b_window, to_slice(phi), opt);
}

}  // namespace homext
