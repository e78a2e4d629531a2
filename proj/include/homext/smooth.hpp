#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "homext/oracle.hpp"
#include "homext/rational.hpp"
#include "homext/zoom.hpp"

namespace homext {

/* Smooth alpha-homogeneous functions on the model R^n x R. An a-homogeneous
   g away from t = 0 factors through side profiles gamma_pm,

     g(X, t) = gamma_+(tX) t^{-a}          (t > 0)
     g(X, t) = s gamma_-(tX) |t|^{-a}      (t < 0, s = (-1)^a for integer a)

   and extends smoothly across t = 0 exactly when the profiles satisfy the
   case conditions: all jets of gamma_+ - gamma_- vanish at 0 (a a nonpositive
   integer), additionally both vanish to order a-1 (a a positive integer), or
   both profiles are flat at 0 (a nonintegral). Profiles are polynomials plus
   an optional exactly-flat remainder, so jets are exact and flatness is a
   decidable property of the data. */

// Polynomial on R^n with exact directional-derivative extraction.
struct PolyN {
  int n = 1;
  struct Term {
    Cplx coeff;
    std::vector<int> powers;
  };
  std::vector<Term> terms;

  static PolyN zero(int n) { return PolyN{n, {}}; }

  static PolyN monomial(int n, std::vector<int> powers, Cplx coeff) {
    return PolyN{n, {Term{coeff, std::move(powers)}}};
  }

  Cplx value(const Vec& X) const {
    Cplx acc(0.0);
    for (const auto& t : terms) {
      Cplx m = t.coeff;
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < t.powers[size_t(i)]; ++k) m *= X[size_t(i)];
      acc += m;
    }
    return acc;
  }

  int total_degree(const Term& t) const {
    int d = 0;
    for (int p : t.powers) d += p;
    return d;
  }

  int max_degree() const {
    int d = 0;
    for (const auto& t : terms) d = std::max(d, total_degree(t));
    return d;
  }

  // coefficient of sigma^m in P(sigma X); X^{(m)}P(0) = m! * this
  Cplx directional_coeff(int m, const Vec& X) const {
    Cplx acc(0.0);
    for (const auto& t : terms) {
      if (total_degree(t) != m) continue;
      Cplx v = t.coeff;
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < t.powers[size_t(i)]; ++k) v *= X[size_t(i)];
      acc += v;
    }
    return acc;
  }

  // first total order carrying a nonzero coefficient at or below max_order,
  // or -1 if none
  int lowest_nonzero_order(int max_order) const {
    int best = -1;
    for (const auto& t : terms) {
      if (std::abs(t.coeff) == 0.0) continue;
      const int d = total_degree(t);
      if (d <= max_order && (best < 0 || d < best)) best = d;
    }
    return best;
  }

  friend PolyN operator-(const PolyN& p, const PolyN& q) {
    // canonicalize: collect by exponent vector
    std::map<std::vector<int>, Cplx> acc;
    for (const auto& t : p.terms) acc[t.powers] += t.coeff;
    for (const auto& t : q.terms) acc[t.powers] -= t.coeff;
    PolyN out{p.n, {}};
    for (auto& [pw, c] : acc)
      if (std::abs(c) != 0.0) out.terms.push_back({c, pw});
    return out;
  }

  // 1-D jet of sigma -> P(sigma X) at sigma; exact, the function is a
  // polynomial in sigma
  Jet ray_jet(double sigma, const Vec& X, int order) const {
    Jet s = Jet::variable(sigma, order);
    Jet acc(order);
    const int D = max_degree();
    for (int m = 0; m <= D; ++m) {
      const Cplx cm = directional_coeff(m, X);
      if (cm == Cplx(0.0)) continue;
      Jet p = Jet::constant(cm, order);
      for (int k = 0; k < m; ++k) p = p * s;
      acc += p;
    }
    return acc;
  }
};

// exactly-flat remainder: coeff * exp(-1/|X|^2) * B(|X| / width)
struct FlatTerm {
  Cplx coeff{0.0, 0.0};
  double width = 1.0;

  Cplx value_at_radius(double r) const {
    if (coeff == Cplx(0.0)) return Cplx(0.0);
    if (r * r < 1.0 / 700.0) return Cplx(0.0);  // exact-to-double underflow guard
    return coeff * std::exp(-1.0 / (r * r)) * mollifier(r / width);
  }

  Jet ray_jet(double sigma, double xnorm, int order) const {
    // jets of sigma -> value_at_radius(|sigma| xnorm) for sigma > 0
    if (coeff == Cplx(0.0)) return Jet(order);
    Jet s = Jet::variable(sigma, order);
    Jet r = s * Cplx(xnorm);
    const double rv = sigma * xnorm;
    if (rv * rv < 1.0 / 700.0 || rv >= width) return Jet(order);
    Jet flat = exp(Cplx(-1.0) / (r * r));
    TestFn win = TestFn::bump(0.0, width);
    return flat * win.jet_compose(r) * coeff;
  }
};

struct SideProfile {
  PolyN poly;
  FlatTerm flat;

  Cplx value(const Vec& X) const {
    double r2 = 0.0;
    for (double x : X) r2 += x * x;
    return poly.value(X) + flat.value_at_radius(std::sqrt(r2));
  }
};

struct SideProfiles {
  SideProfile plus;
  SideProfile minus;
};

struct HomSmoothSpec {
  int n = 1;
  Rational a;
  SideProfiles profiles;
};

enum class SmoothCase { nonpositive_integer, positive_integer, nonintegral };

inline SmoothCase smooth_case(const Rational& a) {
  if (a.is_integer()) return a.num <= 0 ? SmoothCase::nonpositive_integer
                                        : SmoothCase::positive_integer;
  return SmoothCase::nonintegral;
}

struct SpecVerdict {
  bool ok = true;
  SmoothCase case_tag = SmoothCase::nonintegral;
  int violation_order = -1;
  std::string reason;
};

/* Exact jet comparison of the side profiles against the case conditions.
   Flat remainders contribute no jets by construction. */
inline SpecVerdict check_spec(const HomSmoothSpec& spec, int max_order = 12) {
  SpecVerdict v;
  v.case_tag = smooth_case(spec.a);
  PolyN diff = spec.profiles.plus.poly - spec.profiles.minus.poly;
  // polynomial flatness is decidable at every order; widen the cap so no
  // stored term escapes the comparison
  max_order = std::max({max_order, diff.max_degree(), spec.profiles.plus.poly.max_degree(),
                        spec.profiles.minus.poly.max_degree()});
  switch (v.case_tag) {
    case SmoothCase::nonpositive_integer: {
      const int bad = diff.lowest_nonzero_order(max_order);
      if (bad >= 0) {
        v.ok = false;
        v.violation_order = bad;
        v.reason = "side profiles differ at jet order " + std::to_string(bad);
      }
      break;
    }
    case SmoothCase::positive_integer: {
      const int amin = int(spec.a.num);
      for (const auto* side : {&spec.profiles.plus.poly, &spec.profiles.minus.poly}) {
        const int low = side->lowest_nonzero_order(amin - 1);
        if (low >= 0) {
          v.ok = false;
          v.violation_order = low;
          v.reason = "profile fails to vanish at order " + std::to_string(amin - 1);
          return v;
        }
      }
      const int bad = diff.lowest_nonzero_order(max_order);
      if (bad >= 0) {
        v.ok = false;
        v.violation_order = bad;
        v.reason = "side profiles differ at jet order " + std::to_string(bad);
      }
      break;
    }
    case SmoothCase::nonintegral: {
      for (const auto* side : {&spec.profiles.plus.poly, &spec.profiles.minus.poly}) {
        const int low = side->lowest_nonzero_order(max_order);
        if (low >= 0) {
          v.ok = false;
          v.violation_order = low;
          v.reason = "profile must be flat; nonzero jet at order " + std::to_string(low);
          return v;
        }
      }
      break;
    }
  }
  return v;
}

/* The built function, with exact t-jets away from t = 0 and the prescribed
   value on the t = 0 slice. */
class SmoothHom {
 public:
  SmoothHom(HomSmoothSpec spec, bool skip_check) : spec_(std::move(spec)) {
    if (!skip_check) {
      SpecVerdict v = check_spec(spec_);
      if (!v.ok) throw PreconditionError("profile data violates the smoothness case: " + v.reason);
    }
    const SmoothCase c = smooth_case(spec_.a);
    sign_minus_ = Cplx(1.0);
    if (c != SmoothCase::nonintegral && (spec_.a.num % 2 != 0)) sign_minus_ = Cplx(-1.0);
  }

  const HomSmoothSpec& spec() const { return spec_; }

  Cplx value(const Vec& X, double t) const {
    const double av = spec_.a.to_double();
    if (t > 0.0) {
      Vec tX = X;
      for (auto& x : tX) x *= t;
      return spec_.profiles.plus.value(tX) * std::pow(t, -av);
    }
    if (t < 0.0) {
      Vec tX = X;
      for (auto& x : tX) x *= t;
      return sign_minus_ * spec_.profiles.minus.value(tX) * std::pow(-t, -av);
    }
    // the t = 0 slice per case
    switch (smooth_case(spec_.a)) {
      case SmoothCase::nonpositive_integer:
        return spec_.a.num == 0 ? spec_.profiles.plus.value(X) : Cplx(0.0);
      case SmoothCase::positive_integer:
        // (1/a!) X^{(a)} gamma_+(0) = directional coefficient of order a
        return spec_.profiles.plus.poly.directional_coeff(int(spec_.a.num), X);
      default:
        return Cplx(0.0);
    }
  }

  // d^l/dt^l g(X, t) for t != 0, by exact ray jets
  Cplx t_derivative(const Vec& X, double t, int l) const {
    const double av = spec_.a.to_double();
    double xnorm = 0.0;
    for (double x : X) xnorm += x * x;
    xnorm = std::sqrt(xnorm);
    if (t > 0.0) {
      Jet prof = spec_.profiles.plus.poly.ray_jet(t, X, l) +
                 spec_.profiles.plus.flat.ray_jet(t, xnorm, l);
      Jet p = pow(Jet::variable(t, l), Cplx(-av));
      return (prof * p).derivative(l);
    }
    // t < 0: g = sign * gamma_-(tX) (-t)^{-a}; evaluate via u = -t > 0
    const double u = -t;
    Vec Xm = X;
    for (auto& x : Xm) x = -x;
    Jet prof = spec_.profiles.minus.poly.ray_jet(u, Xm, l) +
               spec_.profiles.minus.flat.ray_jet(u, xnorm, l);
    Jet p = pow(Jet::variable(u, l), Cplx(-av));
    Jet g_of_u = prof * p * sign_minus_;
    // d^l/dt^l = (-1)^l d^l/du^l
    return (l % 2 == 0 ? 1.0 : -1.0) * g_of_u.derivative(l);
  }

  // density oracle g dX dt
  ModelOracle oracle(double tol = 1e-9) const {
    SmoothHom self = *this;
    DensityOptions opt;
    opt.tol = tol;
    return density_oracle(
        spec_.n, [self](const Vec& X, double t) { return self.value(X, t); }, opt);
  }

 private:
  HomSmoothSpec spec_;
  Cplx sign_minus_{1.0};
};

inline SmoothHom build(const HomSmoothSpec& spec) { return SmoothHom(spec, false); }
// diagnostic path: build a violating spec to measure its blow-up rate
inline SmoothHom build_unchecked(const HomSmoothSpec& spec) { return SmoothHom(spec, true); }

/* Limit of d_t^l g as t -> 0 for the nonpositive-integer case:
   0 for l < -a, and l!/(l+a)! X^{(l+a)} gamma_+(0) above. */
inline Cplx dt_limit(const HomSmoothSpec& spec, int l, const Vec& X) {
  if (smooth_case(spec.a) != SmoothCase::nonpositive_integer)
    throw PreconditionError("t-derivative limits are stated for nonpositive integer degrees");
  const long long a = spec.a.num;
  if (l < -a) return Cplx(0.0);
  const int m = int(l + a);  // order of the directional derivative
  // l!/(l+a)! * X^{(m)} gamma_+(0) = l!/(m)! * m! * directional_coeff = l! * dc
  double fac = 1.0;
  for (int i = m + 1; i <= l; ++i) fac *= i;  // l!/(l+a)!
  double mfac = 1.0;
  for (int i = 2; i <= m; ++i) mfac *= i;
  return fac * mfac * spec.profiles.plus.poly.directional_coeff(m, X);
}

}  // namespace homext
