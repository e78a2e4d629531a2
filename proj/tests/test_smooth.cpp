#include <doctest.h>

#include "homext/smooth.hpp"
#include "homext/zoom.hpp"

using namespace homext;

namespace {

HomSmoothSpec spec1d(long long anum, long long aden, PolyN plus, PolyN minus,
                     FlatTerm flat_plus = {}, FlatTerm flat_minus = {}) {
  HomSmoothSpec s;
  s.n = 1;
  s.a = Rational(anum, aden);
  s.profiles.plus = {std::move(plus), flat_plus};
  s.profiles.minus = {std::move(minus), flat_minus};
  return s;
}

PolyN z(int n = 1) { return PolyN::monomial(n, {1}, Cplx(1.0)); }
PolyN z2(int n = 1) { return PolyN::monomial(n, {2}, Cplx(1.0)); }
PolyN one(int n = 1) { return PolyN::monomial(n, {0}, Cplx(1.0)); }

// central finite difference of order l with step h
Cplx central_fd(const std::function<Cplx(double)>& f, int l, double h) {
  Cplx acc(0.0);
  for (int i = 0; i <= l; ++i) {
    const double x = (i - 0.5 * l) * h;
    double binom = 1.0;
    for (int k = 0; k < i; ++k) binom = binom * (l - k) / (k + 1);
    acc += ((l - i) % 2 == 0 ? 1.0 : -1.0) * binom * f(x);
  }
  return acc / std::pow(h, l);
}

}  // namespace

TEST_CASE("verdicts across the three cases") {
  // a = 1, gamma_pm = z: vanishes at order 0, difference zero
  CHECK(check_spec(spec1d(1, 1, z(), z())).ok);
  // a = 1, gamma_+ = 1: fails at jet order 0
  SpecVerdict bad = check_spec(spec1d(1, 1, one(), one()));
  CHECK(!bad.ok);
  CHECK(bad.violation_order == 0);
  // a = 1/2, nonzero polynomial profile: must be flat
  SpecVerdict flat = check_spec(spec1d(1, 2, z(), PolyN::zero(1)));
  CHECK(!flat.ok);
  CHECK(flat.case_tag == SmoothCase::nonintegral);
  // a = 1/2 with only flat remainders: fine
  CHECK(check_spec(spec1d(1, 2, PolyN::zero(1), PolyN::zero(1), FlatTerm{Cplx(1.0), 1.0})).ok);
  // a = -1: profiles must agree to all orders
  CHECK(check_spec(spec1d(-1, 1, z(), z())).ok);
  CHECK(!check_spec(spec1d(-1, 1, z(), z2())).ok);
  // a = 2: gamma = z fails (must vanish at order 1)
  SpecVerdict v2 = check_spec(spec1d(2, 1, z(), z()));
  CHECK(!v2.ok);
  CHECK(v2.violation_order == 1);
  CHECK(check_spec(spec1d(2, 1, z2(), z2())).ok);
}

TEST_CASE("built functions match their closed forms") {
  // a = 1, gamma_pm = z: g = X everywhere
  SmoothHom g1 = build(spec1d(1, 1, z(), z()));
  for (double x : {-0.7, 0.0, 1.3})
    for (double t : {-0.9, 0.0, 0.4}) CHECK(std::abs(g1.value({x}, t) - Cplx(x)) < 1e-14);

  // a = 2, gamma_pm = z^2: g = X^2
  SmoothHom g2 = build(spec1d(2, 1, z2(), z2()));
  CHECK(std::abs(g2.value({0.8}, 0.5) - Cplx(0.64)) < 1e-14);
  CHECK(std::abs(g2.value({0.8}, 0.0) - Cplx(0.64)) < 1e-14);
  CHECK(std::abs(g2.value({0.8}, -0.5) - Cplx(0.64)) < 1e-14);

  // a = -1, gamma_pm = 1: g = t
  SmoothHom gm = build(spec1d(-1, 1, one(), one()));
  for (double t : {-0.9, 0.0, 0.4}) CHECK(std::abs(gm.value({0.3}, t) - Cplx(t)) < 1e-14);
  CHECK(std::abs(gm.t_derivative({0.3}, 0.2, 1) - Cplx(1.0)) < 1e-13);
  CHECK(std::abs(gm.t_derivative({0.3}, -0.2, 1) - Cplx(1.0)) < 1e-13);
}

TEST_CASE("t-derivative limits in the nonpositive case") {
  // a = -1, gamma_+ = 1, l = 1 -> 1 (g = t)
  CHECK(std::abs(dt_limit(spec1d(-1, 1, one(), one()), 1, {0.5}) - Cplx(1.0)) < 1e-14);
  // a = -1, gamma_+ = z, l = 2 -> 2X (g = t^2 X)
  CHECK(std::abs(dt_limit(spec1d(-1, 1, z(), z()), 2, {0.7}) - Cplx(1.4)) < 1e-14);
  // l below -a gives zero
  CHECK(dt_limit(spec1d(-2, 1, z(), z()), 1, {0.7}) == Cplx(0.0));
  // case precondition
  CHECK_THROWS_AS(dt_limit(spec1d(1, 1, z(), z()), 1, {0.7}), PreconditionError);
}

TEST_CASE("finite differences converge to the limits at order >= 2") {
  // a = -2, gamma_pm = z^3: g = t^2 (tX)^3 / ... explicitly gamma(tX) t^2
  HomSmoothSpec sp = spec1d(-2, 1, PolyN::monomial(1, {3}, Cplx(1.0)),
                            PolyN::monomial(1, {3}, Cplx(1.0)));
  SmoothHom g = build(sp);
  const Vec X = {0.8};
  for (int l : {2, 3, 5}) {
    const Cplx limit = dt_limit(sp, l, X);
    auto f = [&](double t) { return t == 0.0 ? g.value(X, 0.0) : g.value(X, t); };
    const Cplx fd1 = central_fd(f, l, 0.02);
    const Cplx fd2 = central_fd(f, l, 0.01);
    const double e1 = std::abs(fd1 - limit), e2 = std::abs(fd2 - limit);
    CAPTURE(l);
    if (e1 > 1e-10) {
      const double order = std::log2(e1 / e2);
      CHECK(order >= 1.9);
    }
    CHECK(e2 < 1e-3 * (1.0 + std::abs(limit)));
  }
}

TEST_CASE("built oracles are homogeneous at function degree plus n-1") {
  // n = 1: density degree = a + 0
  SmoothHom g1 = build(spec1d(1, 1, z(), z()));
  ModelOracle u = g1.oracle(1e-10);
  SeededRng rng(3);
  std::vector<ProductTestFn> probes;
  for (int i = 0; i < 3; ++i) probes.push_back(random_product_probe(rng, 1));
  DefectSweep sweep = homogeneity_sweep(u, Cplx(1.0), ActionKind::alpha, probes, {0.5, 2.0});
  CHECK(sweep.max_normalized_defect < 1e-8);

  SmoothHom gm = build(spec1d(-1, 1, one(), one()));
  DefectSweep sweep2 =
      homogeneity_sweep(gm.oracle(1e-10), Cplx(-1.0), ActionKind::alpha, probes, {0.5, 2.0});
  CHECK(sweep2.max_normalized_defect < 1e-8);

  // n = 2, a = 1, gamma_pm = z1: g = X1
  HomSmoothSpec sp2;
  sp2.n = 2;
  sp2.a = Rational(1);
  sp2.profiles.plus = {PolyN::monomial(2, {1, 0}, Cplx(1.0)), {}};
  sp2.profiles.minus = sp2.profiles.plus;
  SmoothHom g2 = build(sp2);
  CHECK(std::abs(g2.value({0.3, 0.4}, -0.7) - Cplx(0.3)) < 1e-14);
  SeededRng rng2(5);
  std::vector<ProductTestFn> probes2;
  for (int i = 0; i < 2; ++i) probes2.push_back(random_product_probe(rng2, 2));
  DefectSweep sweep3 =
      homogeneity_sweep(g2.oracle(1e-9), Cplx(2.0), ActionKind::alpha, probes2, {0.5, 2.0});
  CHECK(sweep3.max_normalized_defect < 1e-8);
}

TEST_CASE("violating specs blow up at the predicted rate") {
  // a = 1 with gamma_+ = 1: the bad jet is i = 0, so d_t^l g ~ t^{i-a-l};
  // e.g. l = 0: g ~ t^{-1} as t -> 0
  SmoothHom bad = build_unchecked(spec1d(1, 1, one(), one()));
  std::vector<double> ts, vs;
  for (double t : {1e-2, 1e-3, 1e-4, 1e-5}) {
    ts.push_back(std::log(t));
    vs.push_back(std::log(std::abs(bad.value({0.5}, t))));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < ts.size(); ++i) {
    sx += ts[i];
    sy += vs[i];
    sxx += ts[i] * ts[i];
    sxy += ts[i] * vs[i];
  }
  const double slope = (ts.size() * sxy - sx * sy) / (ts.size() * sxx - sx * sx);
  CHECK(std::abs(slope - (-1.0)) < 0.05);  // predicted power i - a - l = -1

  // refusal at build time
  CHECK_THROWS_AS(build(spec1d(1, 1, one(), one())), PreconditionError);
}
