#pragma once

#include <map>
#include <string>
#include <vector>

#include "homext/boundary.hpp"
#include "homext/dist1d.hpp"
#include "homext/polar.hpp"
#include "homext/smooth.hpp"

namespace homext {

/* Built-in distribution catalog for the command-line front end and the
   acceptance suite. Every entry records its parameter schema; the helpers
   build line distributions, model densities, and traces, along with their
   known degree bookkeeping (density convention: alpha Jacobian s^{n-1}
   included). */

struct CatalogParam {
  std::string name;
  std::string kind;  // "rational" | "real" | "int" | "string"
  std::string doc;
};

struct CatalogEntry {
  std::string id;
  std::string domain;  // "line" | "model" | "trace"
  std::string doc;
  std::vector<CatalogParam> params;
};

inline const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = {
      {"tplus",
       "line",
       "regularized power t_+^{a-1} (side=minus reflects)",
       {{"a", "rational", "degree"}, {"side", "string", "plus|minus (default plus)"}}},
      {"delta_k",
       "line",
       "k-th derivative of the delta at 0",
       {{"k", "int", "derivative order"}}},
      {"radial_profile",
       "model",
       "|X|^p g0(t|X|) dX dt with g0 a bump; alpha-degree p + n - 1",
       {{"p", "real", "radial exponent"},
        {"g0_center", "real", "bump center (default 0.5)"},
        {"g0_width", "real", "bump width (default 1.2)"}}},
      {"power_xt",
       "model",
       "|X|^p |t|^q on the punctured space; alpha-degree p - q + n - 1",
       {{"p", "real", "radial exponent"}, {"q", "real", "time exponent"}}},
      {"xpow_tplus",
       "model",
       "|X|^q e(|X|-free) tensor t_+^{c-1}; alpha-degree q + n - c",
       {{"q", "real", "radial exponent"}, {"c", "rational", "time degree"}}},
      {"boundary_element",
       "model",
       "boundary-supported element: beta-derivative with t_pm/delta time part",
       {{"a", "rational", "homogeneity degree"},
        {"b", "int", "normal order |beta|"},
        {"lm", "real", "lambda_minus"},
        {"l0", "real", "lambda_0"},
        {"lp", "real", "lambda_plus"}}},
      {"smooth_hom",
       "model",
       "smooth homogeneous function from monomial side profiles",
       {{"a", "rational", "function degree"},
        {"m", "int", "monomial order of gamma_pm"},
        {"coeff", "real", "monomial coefficient (default 1)"}}},
      {"point_trace", "trace", "g -> int_S g(omega, 0); gamma weak degree 0", {}},
      {"bump_trace",
       "trace",
       "bump density in tau on every sheet; gamma weak degree 1",
       {{"center", "real", "bump center (default 0.25)"},
        {"width", "real", "bump width (default 1.0)"}}},
      {"powertau_trace",
       "trace",
       "two-sided regularized |tau|^{c-1}; gamma weak degree exactly c",
       {{"c", "rational", "trace degree (not a nonpositive integer)"}}},
  };
  return entries;
}

inline const CatalogEntry* find_entry(const std::string& id) {
  for (const auto& e : catalog_entries())
    if (e.id == id) return &e;
  return nullptr;
}

// smallest edit distance, for the unknown-id hint
inline std::string nearest_catalog_id(const std::string& id) {
  auto dist = [](const std::string& a, const std::string& b) {
    std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (size_t i = 1; i <= a.size(); ++i) {
      cur[0] = i;
      for (size_t j = 1; j <= b.size(); ++j) {
        const size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
        cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
      }
      std::swap(prev, cur);
    }
    return prev[b.size()];
  };
  std::string best;
  size_t best_d = SIZE_MAX;
  for (const auto& e : catalog_entries()) {
    const size_t d = dist(id, e.id);
    if (d < best_d) {
      best_d = d;
      best = e.id;
    }
  }
  return best;
}

struct CatalogParams {
  std::map<std::string, std::string> raw;

  bool has(const std::string& k) const { return raw.count(k) > 0; }
  double real(const std::string& k, double def) const {
    auto it = raw.find(k);
    return it == raw.end() ? def : std::stod(it->second);
  }
  int integer(const std::string& k, int def) const {
    auto it = raw.find(k);
    return it == raw.end() ? def : std::stoi(it->second);
  }
  std::string str(const std::string& k, const std::string& def) const {
    auto it = raw.find(k);
    return it == raw.end() ? def : it->second;
  }
  Rational rational(const std::string& k, Rational def) const {
    auto it = raw.find(k);
    if (it == raw.end()) return def;
    const std::string& v = it->second;
    auto slash = v.find('/');
    if (slash == std::string::npos) {
      // integers or decimals with short denominators
      if (v.find('.') == std::string::npos) return Rational(std::stoll(v));
      const double x = std::stod(v);
      const long long den = 1000000;
      return Rational((long long)std::llround(x * den), den);
    }
    return Rational(std::stoll(v.substr(0, slash)), std::stoll(v.substr(slash + 1)));
  }
};

// ---- line distributions ----------------------------------------------------

struct LineCatalogItem {
  LineOracle oracle;
  RationalDegree dilation_degree;  // <u, phi(./s)> = s^deg <u, phi>
  bool anomalous = false;          // log anomaly cases (degree in -N)
  RegularizedPower power{RationalDegree::exact_rational(Rational(1))};
  bool is_power = false;
};

inline LineCatalogItem make_line_dist(const std::string& id, const CatalogParams& par) {
  if (id == "tplus") {
    Rational a = par.rational("a", Rational(1, 2));
    const bool minus = par.str("side", "plus") == "minus";
    RegularizedPower p(RationalDegree::exact_rational(a),
                       minus ? RegularizedPower::Side::minus : RegularizedPower::Side::plus);
    LineCatalogItem item{p.oracle(), RationalDegree::exact_rational(a),
                         a.is_nonpositive_integer(), p, true};
    return item;
  }
  if (id == "delta_k") {
    const int k = par.integer("k", 0);
    DeltaDerivative d{k};
    return LineCatalogItem{d.oracle(), RationalDegree::exact_rational(Rational(-k)), false};
  }
  throw ConfigError("catalog id '" + id + "' is not a line distribution");
}

// ---- model distributions ---------------------------------------------------

struct ModelCatalogItem {
  ModelOracle oracle;
  RationalDegree alpha_degree;
  bool punctured = false;
  // trace bookkeeping when the polar factorization is known in closed form
  bool has_trace = false;
  RationalDegree trace_degree;
};

inline ModelCatalogItem make_model_dist(const std::string& id, int n, const CatalogParams& par,
                                        double tol = 1e-10) {
  if (id == "radial_profile") {
    const double p = par.real("p", 0.5);
    TestFn g0 = TestFn::bump(par.real("g0_center", 0.5), par.real("g0_width", 1.2));
    Interval gs = g0.support();
    DensityOptions opt;
    opt.tol = tol;
    // catalog densities are isotropic; a modest trapezoid is spectrally exact
    opt.sphere_points = 20;
    opt.t_window = [gs](double r) {
      double a = gs.lo / r, b = gs.hi / r;
      if (a > b) std::swap(a, b);
      return Interval{a, b};
    };
    opt.punctured = p <= -1.0;
    ModelOracle u = density_oracle(
        n,
        [g0, p, n](const Vec& X, double t) {
          double r2 = 0.0;
          for (int i = 0; i < n; ++i) r2 += X[size_t(i)] * X[size_t(i)];
          const double r = std::sqrt(r2);
          if (r == 0.0) return Cplx(0.0);
          return std::pow(r, p) * g0.value(t * r);
        },
        opt);
    ModelCatalogItem item{u, RationalDegree::approx(Cplx(p + n - 1, 0.0)), opt.punctured, true,
                          RationalDegree::exact_rational(Rational(1))};
    return item;
  }
  if (id == "power_xt") {
    const double p = par.real("p", -2.0);
    const double q = par.real("q", -0.5);
    DensityOptions opt;
    opt.tol = tol;
    opt.sphere_points = 20;
    opt.punctured = true;  // generally singular at X = 0
    ModelOracle u = density_oracle(
        n,
        [p, q, n](const Vec& X, double t) {
          double r2 = 0.0;
          for (int i = 0; i < n; ++i) r2 += X[size_t(i)] * X[size_t(i)];
          const double r = std::sqrt(r2);
          if (r == 0.0 || t == 0.0) return Cplx(0.0);
          return Cplx(std::pow(r, p) * std::pow(std::abs(t), q));
        },
        opt);
    ModelCatalogItem item{u, RationalDegree::approx(Cplx(p - q + n - 1, 0.0)), true, true,
                          RationalDegree::approx(Cplx(q + 1.0, 0.0))};
    return item;
  }
  if (id == "xpow_tplus") {
    const double q = par.real("q", 0.5);
    Rational c = par.rational("c", Rational(1, 2));
    RegularizedPower tp(RationalDegree::exact_rational(c));
    ModelOracle u = ModelOracle::from_slices(n, [q, n, tp, tol](const ModelSliceFn& F) {
      QuadOptions outer;
      outer.abs_tol = tol;
      const double r_hi = std::min(detail::box_outer_radius(F.x_box), F.r_window.hi);
      const double r_lo = std::max(detail::box_inner_radius(F.x_box), F.r_window.lo);
      SphereGrid grid = SphereGrid::standard(n);
      double err = 0.0;
      auto radial = [&](double r) {
        Cplx acc(0.0);
        for (size_t j = 0; j < grid.points.size(); ++j) {
          Vec X(size_t(n), 0.0);
          for (int i = 0; i < n; ++i) X[size_t(i)] = r * grid.points[j][size_t(i)];
          Fn1 slice = F.slice(X);
          if (slice.is_zero()) continue;
          Pairing pt = tp.pair(slice);
          acc += grid.weights[j] * pt.value;
          err = std::max(err, pt.err);
        }
        double rpow = std::pow(r, q);
        for (int i = 0; i < n - 1; ++i) rpow *= r;
        return acc * rpow;
      };
      QuadResult qd = integrate(radial, r_lo, r_hi, outer);
      return Pairing{qd.value, qd.err + err};
    });
    // degree: q + (n-1) from the fiber, -c + 1 - 1 from the time pairing
    RationalDegree deg = RationalDegree::approx(Cplx(q + n - c.to_double(), 0.0));
    return ModelCatalogItem{u, deg, false, false, RationalDegree()};
  }
  if (id == "boundary_element") {
    Rational a = par.rational("a", Rational(-1));
    const int b = par.integer("b", 0);
    std::vector<int> beta(size_t(n), 0);
    beta[0] = b;
    BoundaryElement e = make_element(n, a, beta, Cplx(par.real("lm", 0.0)),
                                     Cplx(par.real("l0", 1.0)), Cplx(par.real("lp", 0.0)));
    return ModelCatalogItem{e.oracle(), RationalDegree::exact_rational(a), false, false,
                            RationalDegree()};
  }
  if (id == "smooth_hom") {
    Rational a = par.rational("a", Rational(1));
    const int m = par.integer("m", 1);
    const Cplx coeff(par.real("coeff", 1.0));
    std::vector<int> powers(size_t(n), 0);
    powers[0] = m;
    HomSmoothSpec sp;
    sp.n = n;
    sp.a = a;
    sp.profiles.plus = {PolyN::monomial(n, powers, coeff), {}};
    sp.profiles.minus = sp.profiles.plus;
    SmoothHom g = build(sp);
    return ModelCatalogItem{g.oracle(tol),
                            RationalDegree::exact_rational(a + Rational(n - 1)), false, false,
                            RationalDegree()};
  }
  throw ConfigError("catalog id '" + id + "' is not a model distribution");
}

// ---- traces ----------------------------------------------------------------

// density handle for split-capable traces
struct TraceDensityHandle {
  std::function<Cplx(const Vec&, double)> density;
  Interval tau_support;
};

struct TraceCatalogItem {
  TraceOracle oracle;
  RationalDegree gamma_degree;
  std::optional<TraceDensityHandle> density;
};

inline TraceCatalogItem make_trace(const std::string& id, int n, const CatalogParams& par,
                                   double tol = 1e-10) {
  if (id == "point_trace") {
    return TraceCatalogItem{trace_point_eval(n), RationalDegree::exact_rational(Rational(0)),
                            std::nullopt};
  }
  if (id == "bump_trace") {
    TestFn h = TestFn::bump(par.real("center", 0.25), par.real("width", 1.0));
    DensityOptions opt;
    opt.tol = tol;
    auto dens = [h](const Vec&, double tau) { return h.value(tau); };
    TraceOracle w = trace_density(n, dens, h.support(), opt);
    return TraceCatalogItem{w, RationalDegree::exact_rational(Rational(1)),
                            TraceDensityHandle{dens, h.support()}};
  }
  if (id == "powertau_trace") {
    Rational c = par.rational("c", Rational(1, 2));
    if (c.is_nonpositive_integer())
      throw ConfigError("powertau_trace needs a degree off the nonpositive integers");
    RegularizedPower tp(RationalDegree::exact_rational(c), RegularizedPower::Side::plus, tol);
    RegularizedPower tm(RationalDegree::exact_rational(c), RegularizedPower::Side::minus, tol);
    SphereGrid grid = SphereGrid::standard(n);
    auto pair = [tp, tm, grid](const SphereSliceFn& g) -> Pairing {
      Pairing acc;
      for (size_t j = 0; j < grid.points.size(); ++j) {
        Fn1 slice = g.slice(grid.points[j]);
        if (slice.is_zero()) continue;
        Pairing a = tp.pair(slice);
        Pairing b = tm.pair(slice);
        acc.value += grid.weights[j] * (a.value + b.value);
        acc.err += grid.weights[j] * (a.err + b.err);
      }
      return acc;
    };
    return TraceCatalogItem{TraceOracle(n, pair), RationalDegree::exact_rational(c),
                            std::nullopt};
  }
  throw ConfigError("catalog id '" + id + "' is not a trace");
}

}  // namespace homext
