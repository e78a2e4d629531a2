#include <doctest.h>

#include "homext/boundary.hpp"
#include "homext/polar.hpp"

using namespace homext;

TEST_CASE("case classification") {
  // a = 1/3, b = 0: nonintegral, independent powers, no delta
  CaseInfo c1 = classify(Rational(1, 3), 0);
  CHECK(c1.tag == BoundaryCase::nonintegral);
  CHECK(!c1.powers_linked);
  CHECK(!c1.delta_admissible);

  // a = -2, b = 1: a+b = -1, regular powers, independent, no delta
  CaseInfo c2 = classify(Rational(-2), 1);
  CHECK(c2.tag == BoundaryCase::negative);
  CHECK(!c2.powers_linked);
  CHECK(!c2.delta_admissible);

  // a = -1, b = 1: a+b = 0: linked pair, free delta_0
  CaseInfo c3 = classify(Rational(-1), 1);
  CHECK(c3.tag == BoundaryCase::zero);
  CHECK(c3.powers_linked);
  CHECK(c3.linkage == Cplx(-1.0));  // lam_- = -lam_+
  CHECK(c3.delta_admissible);
  CHECK(c3.delta_order == 0);

  // a = 1, b = 1: a+b = 2: linked pair plus free second delta derivative
  CaseInfo c4 = classify(Rational(1), 1);
  CHECK(c4.tag == BoundaryCase::positive);
  CHECK(c4.powers_linked);
  CHECK(c4.linkage == Cplx(-1.0));  // even a+b
  CHECK(c4.delta_order == 2);

  // odd a+b: the measured cancellation flips the printed sign
  CaseInfo c5 = classify(Rational(0), 1);
  CHECK(c5.tag == BoundaryCase::positive);
  CHECK(c5.linkage == Cplx(1.0));  // lam_- = +lam_+
}

TEST_CASE("delta element at the zero case is exactly homogeneous") {
  // beta = (1), delta_0 time part, n = 1: degree a = -1
  BoundaryElement e = make_element(1, Rational(-1), {1}, Cplx(0.0), Cplx(1.0), Cplx(0.0));
  ModelOracle u = e.oracle();
  ProductTestFn phi =
      ProductTestFn::tensor(1, {TestFn::bump(0.1, 1.0, Cplx(1.0), 1)}, TestFn::bump(-0.2, 1.0));
  for (double s : {0.25, 0.5, 2.0, 4.0})
    CHECK(std::abs(homogeneity_defect(u, Cplx(-1.0), ActionKind::alpha, phi, s)) < 1e-12);
}

TEST_CASE("linked powers cancel the log anomaly; violations are refused") {
  // a = 1, b = 1 (a+b = 2, even): lam_+ = 1, lam_- = -1 is admissible
  BoundaryElement ok = make_element(1, Rational(1), {1}, Cplx(-1.0), Cplx(0.0), Cplx(1.0));
  CHECK(std::abs(measured_defect(ok)) < 1e-8);

  // lam_+ = lam_- = 1 violates cancellation: refused with a nonzero defect
  try {
    make_element(1, Rational(1), {1}, Cplx(1.0), Cplx(0.0), Cplx(1.0));
    CHECK(false);
  } catch (const LinkageError& err) {
    CHECK(std::abs(err.measured_defect) > 1e-6);
  }

  // odd a+b: the admissible linkage is lam_- = +lam_+
  BoundaryElement odd = make_element(1, Rational(0), {1}, Cplx(1.0), Cplx(0.0), Cplx(1.0));
  CHECK(std::abs(measured_defect(odd)) < 1e-8);
  CHECK_THROWS_AS(make_element(1, Rational(0), {1}, Cplx(-1.0), Cplx(0.0), Cplx(1.0)),
                  LinkageError);
}

TEST_CASE("nonintegral degrees carry free single-sided powers") {
  // a = 1/2, b = 0: t_+^{-3/2} alone is homogeneous (no anomaly off -N)
  BoundaryElement e = make_element(1, Rational(1, 2), {0}, Cplx(0.0), Cplx(0.0), Cplx(1.0));
  CHECK(std::abs(measured_defect(e)) < 1e-8);

  // requesting a delta part off the admissible set is refused
  CHECK_THROWS_AS(make_element(1, Rational(1, 2), {0}, Cplx(0.0), Cplx(1.0), Cplx(0.0)),
                  LinkageError);
  CHECK_THROWS_AS(make_element(1, Rational(-2), {1}, Cplx(0.0), Cplx(1.0), Cplx(0.0)),
                  LinkageError);
}

TEST_CASE("defect sweep over ten probes and the full scale grid") {
  // representative elements from each case, swept the way the acceptance
  // criterion words it: 10 seeded probes, s in {1/4, 1/2, 2, 4}
  SeededRng rng(51);
  std::vector<BoundaryElement> elems = {
      make_element(1, Rational(1, 2), {0}, Cplx(0.3), Cplx(0.0), Cplx(1.0)),
      make_element(1, Rational(-2), {1}, Cplx(1.0), Cplx(0.0), Cplx(0.5)),
      make_element(1, Rational(-1), {1}, Cplx(-1.0), Cplx(0.8), Cplx(1.0)),
      make_element(1, Rational(1), {1}, Cplx(-1.0), Cplx(0.4), Cplx(1.0))};
  for (const auto& e : elems) {
    ModelOracle u = e.oracle();
    const Cplx av(e.a.to_double(), 0.0);
    for (int i = 0; i < 10; ++i) {
      // probes with nonvanishing jets in the element's slots
      std::vector<TestFn> xs;
      for (int m : e.beta)
        xs.push_back(TestFn::bump(rng.uniform(-0.3, 0.3), rng.uniform(0.8, 1.4), Cplx(1.0), m));
      ProductTestFn phi =
          ProductTestFn::tensor(1, xs, TestFn::bump(rng.uniform(-0.3, 0.4), rng.uniform(0.8, 1.3)));
      const Cplx base = u.pair(phi).value;
      for (double s : {0.25, 0.5, 2.0, 4.0}) {
        const Cplx d = homogeneity_defect(u, av, ActionKind::alpha, phi, s);
        REQUIRE(std::abs(d) <= 1e-8 * (1.0 + std::abs(base)));
      }
    }
  }
}

TEST_CASE("sweep: admissible generators pass their homogeneity probes") {
  SeededRng rng(13);
  for (int num = -4; num <= 4; ++num) {
    for (int b : {0, 1, 2}) {
      const Rational a(num, 2);  // half-integers and integers
      CaseInfo info = classify(a, b);
      std::vector<int> beta = b == 0 ? std::vector<int>{0} : std::vector<int>{b};
      Cplx lm, l0, lp;
      if (info.powers_linked) {
        lp = Cplx(1.0);
        lm = info.linkage;
        l0 = info.delta_admissible ? Cplx(0.7) : Cplx(0.0);
      } else {
        lm = Cplx(rng.uniform(0.5, 1.5));
        lp = Cplx(rng.uniform(0.5, 1.5));
        l0 = Cplx(0.0);
      }
      CAPTURE(num);
      CAPTURE(b);
      BoundaryElement e = make_element(1, a, beta, lm, l0, lp);
      REQUIRE(std::abs(measured_defect(e)) < 1e-8);
    }
  }
}

TEST_CASE("transversal filter") {
  CHECK(transversal_filter(Rational(-2), 1));       // a+b = -1
  CHECK(!transversal_filter(Rational(1, 2), 0));    // nonintegral
  CHECK(!transversal_filter(Rational(1, 2), 3));    // nonintegral
  CHECK(!transversal_filter(Rational(0), 0));       // a+b = 0 not in -N*
  CHECK(!transversal_filter(Rational(2), 1));       // positive
  CHECK(transversal_filter(Rational(-5), 2));       // a+b = -3

  // the generator pairs to the polynomial t^{-a-b-1} density against the
  // time slot (smooth transversal part)
  BoundaryElement gen = transversal_generator(1, Rational(-2), {0});
  // a+b = -2: time part t^{1}: <E, phi> = nu * int t phi(0,t) dt
  ProductTestFn phi = ProductTestFn::tensor(1, {TestFn::bump(0.0, 1.0)}, TestFn::bump(0.4, 1.0));
  const Cplx got = gen.oracle().pair(phi).value;
  const Cplx x0 = phi.summands[0].x[0].value(0.0);
  QuadResult want =
      integrate([&](double t) { return t * phi.summands[0].t.value(t); }, -0.6, 1.4);
  CHECK(std::abs(got - x0 * want.value) <= 1e-9 * (1.0 + std::abs(got)));
}

TEST_CASE("jet separation of distinct normal orders") {
  // elements with distinct b are separated by probes with prescribed X-jets
  BoundaryElement e0 = make_element(1, Rational(-1, 2), {0}, Cplx(0.0), Cplx(0.0), Cplx(1.0));
  BoundaryElement e1 = make_element(1, Rational(-3, 2), {1}, Cplx(0.0), Cplx(0.0), Cplx(1.0));
  // x-even probe kills the b = 1 element, x-odd probe kills the b = 0 one
  ProductTestFn even = ProductTestFn::tensor(1, {TestFn::bump(0.0, 1.0)}, TestFn::bump(0.5, 1.0));
  ProductTestFn odd =
      ProductTestFn::tensor(1, {TestFn::bump(0.0, 1.0, Cplx(1.0), 1)}, TestFn::bump(0.5, 1.0));
  CHECK(std::abs(e1.oracle().pair(even).value) < 1e-12);
  CHECK(std::abs(e0.oracle().pair(odd).value) < 1e-12);
  CHECK(std::abs(e0.oracle().pair(even).value) > 1e-6);
  CHECK(std::abs(e1.oracle().pair(odd).value) > 1e-6);
}

TEST_CASE("extension discrepancies live in the boundary span") {
  // two a-homogeneous extensions of the same punctured distribution differ
  // by boundary elements; every admissible element at degree a = -1/2 is
  // annihilated by probes whose X-jets vanish through order B = ceil|a| + 4
  const int B = 5;
  ProductTestFn jet_probe =
      ProductTestFn::tensor(1, {TestFn::bump(0.0, 1.5, Cplx(1.0), B)}, TestFn::bump(0.3, 1.0));

  BoundaryElement e0 = make_element(1, Rational(-1, 2), {0}, Cplx(0.4), Cplx(0.0), Cplx(1.0));
  BoundaryElement e1 = make_element(1, Rational(-1, 2), {1}, Cplx(0.0), Cplx(0.0), Cplx(1.0));
  CHECK(std::abs(e0.oracle().pair(jet_probe).value) < 1e-13);
  CHECK(std::abs(e1.oracle().pair(jet_probe).value) < 1e-13);

  // shifting an extension by such an element is invisible to those probes
  TestFn h = TestFn::bump(0.25, 1.0);
  DensityOptions topt;
  TraceOracle w = trace_density(
      1, [h](const Vec&, double tau) { return h.value(tau); }, h.support(), topt);
  PolarTrace tr{w, RationalDegree::exact_rational(Rational(1)), false};
  CanonicalExtension ext(tr, RationalDegree::exact_rational(Rational(-1, 2)));
  // the probe read as a polar tensor: f(r) = r^B bump, g isotropic
  TestFn f_jet = TestFn::bump(0.0, 1.5, Cplx(1.0), B);
  SphereLineFn g = SphereLineFn::isotropic(1, TestFn::bump(0.3, 1.0));
  Pairing base = ext.pair(f_jet, g);
  const Cplx shifted = base.value + e0.oracle().pair(jet_probe).value;
  CHECK(std::abs(shifted - base.value) < 1e-13);
}
