#pragma once

#include <cmath>

#include "homext/oracle.hpp"
#include "homext/quadrature.hpp"
#include "homext/rational.hpp"
#include "homext/rng.hpp"

namespace homext {

/* Regularized powers t_+^{a-1} / t_-^{a-1}.

   Pairing cases (plus side; the minus side pairs against phi(-t)):

     Re a > 0:          int_0^inf t^(a-1) phi(t) dt
     Re a <= 0, a not   (-1)^k / (a)_k int_0^inf t^(a-1+k) phi^(k)(t) dt,
     a nonpos integer:  k = floor(-Re a) + 1, (a)_k the rising product
     a in {0,-1,...}:   -1/(k-1)! int_0^inf ln(t) phi^(k)(t) dt, k = -a+1

   The middle case is repeated integration by parts of the first and remains
   valid for any k with Re(a)+k > 0, which is what the cross-case consistency
   oracle exercises. The log-case constant is the unique one agreeing with
   t^(a-1) on (0, inf). Scaling identity for a in -N:

     <t_+^(a-1), phi> - s^(-a) <t_+^(a-1), phi(./s)> = -ln(s) phi^(-a)(0)/(-a)!

   and zero in place of the right side otherwise. */
class RegularizedPower {
 public:
  enum class Side { plus, minus };

  RegularizedPower(RationalDegree degree, Side side = Side::plus, double tol = 1e-10)
      : a_(degree), side_(side), tol_(tol) {}

  const RationalDegree& degree() const { return a_; }
  Side side() const { return side_; }

  Pairing pair(const Fn1& phi) const { return pair_impl(phi, -1); }
  Pairing pair(const TestFn& phi) const { return pair(Fn1::from(phi)); }

  // Evaluate through the integration-by-parts formula at a chosen depth
  // (requires Re(a) + k > 0); used by the cross-case consistency oracle.
  Pairing pair_forced_depth(const Fn1& phi, int k) const {
    if (!(a_.real() + k > 0.0))
      throw PreconditionError("forced depth too small for this degree");
    return pair_impl(phi, k);
  }

  LineOracle oracle() const {
    RegularizedPower self = *this;
    return LineOracle([self](const Fn1& f) { return self.pair(f); });
  }

 private:
  Pairing pair_impl(const Fn1& phi_in, int forced_k) const {
    const Fn1 phi = side_ == Side::plus ? phi_in : phi_in.reflected();
    Interval s = Interval::intersect(phi.support(), {0.0, std::numeric_limits<double>::infinity()});
    if (s.empty()) return {};  // support in the opposite half-line pairs to exactly 0
    QuadOptions opt;
    opt.abs_tol = tol_;
    const Cplx a = a_.value();

    if (a_.is_nonpositive_integer() && forced_k < 0) {
      const int k = int(-a_.rat.num) + 1;
      Fn1 integrand = Fn1::log_fn() * phi.derivative_fn(k);
      QuadResult q = integrate(integrand, s.lo, s.hi, opt);
      const double c = -1.0 / factorial(k - 1);
      return {c * q.value, std::abs(c) * q.err};
    }

    int k = forced_k;
    if (k < 0) k = a.real() > 0.0 ? 0 : int(std::floor(-a.real())) + 1;
    if (k == 0) {
      Fn1 integrand = Fn1::power(a - 1.0) * phi;
      QuadResult q = integrate(integrand, s.lo, s.hi, opt);
      return {q.value, q.err};
    }
    const Cplx denom = pochhammer_rising(a, k);
    if (std::abs(denom) < 1e-14)
      throw PreconditionError("rising product vanishes at this degree/depth");
    Fn1 integrand = Fn1::power(a - 1.0 + double(k)) * phi.derivative_fn(k);
    QuadResult q = integrate(integrand, s.lo, s.hi, opt);
    const Cplx c = (k % 2 == 0 ? 1.0 : -1.0) / denom;
    return {c * q.value, std::abs(c) * q.err};
  }

  RationalDegree a_;
  Side side_;
  double tol_;
};

// <p, phi> - s^(-a) <p, phi(./s)>; zero for homogeneous degrees, the log
// anomaly for a in -N.
inline Cplx scaling_defect(const RegularizedPower& p, const Fn1& phi, double s) {
  const Cplx lhs = p.pair(phi).value;
  const Cplx rhs = p.pair(phi.scaled_arg(1.0 / s)).value;
  return lhs - std::pow(Cplx(s), -p.degree().value()) * rhs;
}

inline Cplx scaling_defect(const RegularizedPower& p, const TestFn& phi, double s) {
  return scaling_defect(p, Fn1::from(phi), s);
}

// d^k/dt^k delta_0: pairing (-1)^k phi^(k)(0); -k-homogeneous for dilation.
struct DeltaDerivative {
  int order = 0;

  Pairing pair(const Fn1& phi) const {
    const Cplx v = phi.derivative(0.0, order);
    return {(order % 2 == 0 ? 1.0 : -1.0) * v, 0.0};
  }
  Pairing pair(const TestFn& phi) const { return pair(Fn1::from(phi)); }

  LineOracle oracle() const {
    DeltaDerivative self = *this;
    return LineOracle([self](const Fn1& f) { return self.pair(f); });
  }
};

/* Averaging weight rho on (0, inf) with int rho(s) s^-1 ds = 1, used by the
   dilation factorization and the polar trace. Default shape is a bump on
   [1/2, 2]; the factorization result is rho-independent, which the suite
   checks rather than assumes. */
class AveragingWeight {
 public:
  explicit AveragingWeight(TestFn shape = TestFn::bump(1.25, 0.75), double tol = 1e-12) {
    Interval s = shape.support();
    if (!(s.lo > 0.0))
      throw PreconditionError("averaging weight must be supported in (0, inf)");
    QuadOptions opt;
    opt.abs_tol = tol;
    QuadResult z =
        integrate([&shape](double x) { return shape.value(x) / x; }, s.lo, s.hi, opt);
    if (std::abs(z.value) < 1e-12)
      throw PreconditionError("averaging weight normalization vanished");
    rho_ = shape.scaled(1.0 / z.value);
  }

  const TestFn& rho() const { return rho_; }
  Interval support() const { return rho_.support(); }

  // rho(1/t) as a jet-evaluable function; support is the reciprocal interval.
  Fn1 rho_of_inverse() const {
    TestFn r = rho_;
    Interval s = r.support();
    return Fn1(
        [r](double t, int order) {
          if (t <= 0.0) return Jet(order);
          return r.jet_compose(Cplx(1.0) / Jet::variable(t, order));
        },
        Interval{1.0 / s.hi, 1.0 / s.lo});
  }

 private:
  TestFn rho_;
};

struct FactorDilationOptions {
  double probe_tol = 1e-7;
  int probes = 10;
  std::uint64_t seed = 101;
  double tol = 1e-10;
};

// Distribution on the base M = R^m, paired against tensor factors.
using BaseOracle = std::function<Pairing(const std::vector<Fn1>&)>;

struct DilationFactorization {
  BaseOracle base;  // the factor v with u = v (x) t_+^(a-1) on M x (0,inf)
  RationalDegree degree;
  double max_probe_defect = 0.0;
};

/* Factorization of an a-homogeneous distribution under (p,t) -> (p, st):
   v(phi) = <u_{p,t}, t^(-a) rho(1/t) phi(p)>, so that
   <u, phi (x) psi> = <v, phi> <t_+^(a-1), psi> for psi supported in (0,inf).
   Homogeneity is probe-checked first; failure reports the worst defect. */
inline DilationFactorization factor_dilation(const ModelOracle& u, const RationalDegree& a,
                                             const AveragingWeight& rho,
                                             const FactorDilationOptions& opt = {}) {
  const int m = u.dim();
  SeededRng rng(opt.seed);
  const Cplx av = a.value();
  double worst = 0.0;
  static const double sgrid[] = {0.25, 0.5, 2.0, 4.0};
  for (int i = 0; i < opt.probes; ++i) {
    std::vector<TestFn> xs;
    for (int j = 0; j < m; ++j) xs.push_back(random_bump(rng));
    TestFn tf = random_positive_bump(rng);
    ProductTestFn phi = ProductTestFn::tensor(m, xs, tf);
    const Cplx base = u.pair(phi).value;
    for (double s : sgrid) {
      const Cplx pulled = u.pair(phi.scale_t(1.0 / s)).value;
      const double defect = std::abs(pulled - std::pow(Cplx(s), av) * base);
      worst = std::max(worst, defect / (1.0 + std::abs(base)));
    }
  }
  if (worst > opt.probe_tol)
    throw NotHomogeneousError("distribution is not homogeneous for the dilation action", worst);

  Fn1 weight = Fn1::power(-av) * rho.rho_of_inverse();
  DilationFactorization out;
  out.degree = a;
  out.max_probe_defect = worst;
  out.base = [u, weight, m](const std::vector<Fn1>& phi) {
    return u.pair(TensorArg::tensor(m, phi, weight));
  };
  return out;
}

}  // namespace homext
