#include <doctest.h>

#include "homext/dist1d.hpp"
#include "homext/zoom.hpp"

using namespace homext;

namespace {

const double kE = std::exp(1.0);

double rel(Cplx got, Cplx want) { return std::abs(got - want) / (1.0 + std::abs(want)); }

RationalDegree deg(long long num, long long den = 1) {
  return RationalDegree::exact_rational(Rational(num, den));
}

}  // namespace

TEST_CASE("classical pairing for positive degrees") {
  // a = 1: <t_+^0, phi> = int_0^inf phi
  TestFn phi = TestFn::bump(2.0, 1.0);
  RegularizedPower p(deg(1));
  QuadResult direct = integrate([&](double t) { return phi.value(t); }, 1.0, 3.0);
  CHECK(rel(p.pair(phi).value, direct.value) < 1e-10);
}

TEST_CASE("support in the opposite half-line pairs to exactly zero") {
  TestFn phi = TestFn::bump(-1.5, 0.5);
  for (auto a : {deg(1), deg(1, 2), deg(-1), deg(0)}) {
    RegularizedPower p(a, RegularizedPower::Side::plus);
    CHECK(p.pair(phi).value == Cplx(0.0));
  }
  // and the minus side annihilates positive-supported functions
  RegularizedPower m(deg(1, 2), RegularizedPower::Side::minus);
  CHECK(m.pair(TestFn::bump(2.0, 1.0)).value == Cplx(0.0));
}

TEST_CASE("cross-case consistency pins the rising-product denominator") {
  SeededRng rng(11);
  for (long long num : {3LL, 6LL, 9LL}) {  // a = 0.3, 0.6, 0.9
    RegularizedPower p(deg(num, 10));
    for (int i = 0; i < 3; ++i) {
      TestFn phi = random_positive_bump(rng);
      const Cplx direct = p.pair(phi).value;
      const Cplx parts = p.pair_forced_depth(Fn1::from(phi), 1).value;
      CHECK(std::abs(direct - parts) <= 1e-9 * std::abs(direct));
    }
  }
}

TEST_CASE("scaling defect vanishes off the anomalous degrees") {
  TestFn phi = TestFn::bump(1.0, 0.8);
  RegularizedPower p(deg(1, 2));
  const Cplx d = scaling_defect(p, phi, 2.0);
  CHECK(std::abs(d) <= 1e-8 * (1.0 + std::abs(p.pair(phi).value)));
}

TEST_CASE("log anomaly values") {
  // a = 0, s = e, phi(0) = 1: defect = -1
  TestFn phi0 = TestFn::bump(0.0, 1.0, Cplx(kE));  // phi(0) = e * B(0) = 1
  RegularizedPower p0(deg(0));
  CHECK(std::abs(scaling_defect(p0, phi0, kE) - Cplx(-1.0)) < 1e-8);

  // a = -1, s = 2, phi'(0) = 3: defect = -3 ln 2
  TestFn phi1 = TestFn::bump(0.0, 1.0, Cplx(3.0 * kE), 1);  // phi'(0) = 3 B(0) e = 3
  RegularizedPower p1(deg(-1));
  CHECK(std::abs(scaling_defect(p1, phi1, 2.0) - Cplx(-3.0 * std::log(2.0))) < 1e-8);

  // minus side picks up (-1)^{-a} on the derivative
  RegularizedPower m1(deg(-1), RegularizedPower::Side::minus);
  CHECK(std::abs(scaling_defect(m1, phi1, 2.0) - Cplx(3.0 * std::log(2.0))) < 1e-8);
}

TEST_CASE("anomalous combination cancels") {
  // t_+^{a-1} + (-1)^{a-1} t_-^{a-1} scales cleanly for a in -N
  SeededRng rng(3);
  for (long long a : {0LL, -1LL, -2LL}) {
    RegularizedPower plus(deg(a), RegularizedPower::Side::plus);
    RegularizedPower minus(deg(a), RegularizedPower::Side::minus);
    const double sign = ((-a + 1) % 2 == 0) ? 1.0 : -1.0;  // (-1)^(a-1) for integer a
    TestFn phi = random_bump(rng);
    auto combo = [&](const Fn1& f) { return plus.pair(f).value + sign * minus.pair(f).value; };
    const Fn1 f = Fn1::from(phi);
    for (double s : {0.5, 2.0}) {
      const Cplx defect = combo(f) - std::pow(s, double(-a)) * combo(f.scaled_arg(1.0 / s));
      CHECK(std::abs(defect) <= 1e-8 * (1.0 + std::abs(combo(f))));
    }
  }
}

TEST_CASE("delta derivative pairings") {
  DeltaDerivative d0{0};
  TestFn phi = TestFn::bump(0.0, 1.5, Cplx(2.0));
  CHECK(rel(d0.pair(phi).value, phi.value(0.0)) < 1e-14);

  DeltaDerivative d1{1};
  TestFn tb = TestFn::bump(0.0, 1.0, Cplx(1.0), 1);  // t B(t)
  CHECK(std::abs(d1.pair(tb).value + std::exp(-1.0)) < 1e-14);

  // degree -1 under dilation: <d', phi(t/2)> = (1/2) <d', phi>
  Fn1 f = Fn1::from(tb);
  CHECK(std::abs(d1.pair(f.scaled_arg(0.5)).value - 0.5 * d1.pair(f).value) < 1e-14);
}

TEST_CASE("averaging weight normalization") {
  AveragingWeight rho;
  Interval s = rho.support();
  CHECK(s.lo == doctest::Approx(0.5));
  CHECK(s.hi == doctest::Approx(2.0));
  QuadResult z = integrate([&](double x) { return rho.rho().value(x) / x; }, s.lo, s.hi,
                           QuadOptions{1e-13, 100, 4000000});
  CHECK(std::abs(z.value - 1.0) < 1e-12);
}

TEST_CASE("dilation factorization recovers the base factor") {
  // u = g(p) t^{a-1} dp dt with a = 3/2: v must be the density g(p) dp
  TestFn g = TestFn::bump(0.5, 1.0);
  auto dens = [g](const Vec& X, double t) -> Cplx {
    if (t <= 0.0) return Cplx(0.0);
    return g.value(X[0]) * std::pow(t, 0.5);
  };
  ModelOracle u = density_oracle(1, dens);
  AveragingWeight rho;
  DilationFactorization fac = factor_dilation(u, deg(3, 2), rho);

  TestFn phi = TestFn::bump(0.3, 0.6);
  const Cplx got = fac.base({Fn1::from(phi)}).value;
  QuadResult want = integrate([&](double x) { return g.value(x) * phi.value(x); }, -2.0, 2.0);
  CHECK(rel(got, want.value) < 1e-8);

  // round trip: <u, phi (x) psi> = <v, phi> <t_+^{a-1}, psi> for psi in [1/2, 4]
  TestFn psi = TestFn::bump(2.0, 1.4);
  ProductTestFn tens = ProductTestFn::tensor(1, {phi}, psi);
  const Cplx lhs = u.pair(tens).value;
  const Cplx rhs = got * RegularizedPower(deg(3, 2)).pair(psi).value;
  CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(lhs));
}

TEST_CASE("factorization recovers a point-evaluation base") {
  // u = delta_{p=1/2} (x) t_+^{a-1}, a = 3/2
  const RationalDegree a = deg(3, 2);
  RegularizedPower tp(a);
  ModelOracle u = ModelOracle::from_tensor(1, [tp](const TensorArg& arg) {
    Pairing acc;
    for (const auto& s : arg.summands) {
      Pairing pt = tp.pair(s.t);
      acc.value += s.x[0].value(0.5) * pt.value;
      acc.err += std::abs(s.x[0].value(0.5)) * pt.err;
    }
    return acc;
  });
  AveragingWeight rho;
  DilationFactorization fac = factor_dilation(u, a, rho);
  TestFn phi = TestFn::bump(0.4, 0.5);
  CHECK(std::abs(fac.base({Fn1::from(phi)}).value - phi.value(0.5)) < 1e-8);
}

TEST_CASE("factorization is independent of the averaging weight") {
  TestFn g = TestFn::bump(0.0, 1.0);
  auto dens = [g](const Vec& X, double t) -> Cplx {
    if (t <= 0.0) return Cplx(0.0);
    return g.value(X[0]) * std::pow(t, 0.25);
  };
  ModelOracle u = density_oracle(1, dens);
  const RationalDegree a = deg(5, 4);
  DilationFactorization f1 = factor_dilation(u, a, AveragingWeight());
  DilationFactorization f2 = factor_dilation(u, a, AveragingWeight(TestFn::bump(1.0, 0.45)));
  TestFn phi = TestFn::bump(0.2, 0.7);
  const Cplx v1 = f1.base({Fn1::from(phi)}).value;
  const Cplx v2 = f2.base({Fn1::from(phi)}).value;
  CHECK(std::abs(v1 - v2) <= 1e-8 * (1.0 + std::abs(v1)));
}

TEST_CASE("non-homogeneous input is rejected with the worst defect") {
  TestFn g = TestFn::bump(0.0, 1.0);
  auto dens = [g](const Vec& X, double t) -> Cplx {
    if (t <= 0.0) return Cplx(0.0);
    return g.value(X[0]) * t;
  };
  ModelOracle u = density_oracle(1, dens);
  CHECK_THROWS_AS(factor_dilation(u, deg(3), AveragingWeight()), NotHomogeneousError);
}
