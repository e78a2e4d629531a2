#include <doctest.h>

#include "homext/tempered.hpp"

using namespace homext;

namespace {

RationalDegree deg(long long num, long long den = 1) {
  return RationalDegree::exact_rational(Rational(num, den));
}

TraceDensityFn bump_density(TestFn h) {
  return [h](const Vec&, double tau) { return h.value(tau); };
}

}  // namespace

TEST_CASE("split is exact and respects domination") {
  TestFn h = TestFn::bump(0.0, 1.5, Cplx(2.0));
  TraceDensityFn f = bump_density(h);
  SplitDensities sd = epsilon_split(f, SplitExponent(0.5));
  SeededRng rng(41);
  for (int i = 0; i < 10000; ++i) {
    const double tau = rng.uniform(-2.0, 2.0);
    const Vec om = {rng.uniform() < 0.5 ? 1.0 : -1.0};
    const Cplx sum = sd.low(om, tau) + sd.high(om, tau);
    const Cplx fv = f(om, tau);
    // exact additivity up to the single rounding in the subtraction
    REQUIRE(std::abs(sum - fv) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(fv));
    REQUIRE(std::abs(sd.low(om, tau)) <= std::pow(std::abs(tau), 0.5) + 1e-15);
  }

  // f below the ramp everywhere: split returns (f, 0)
  TestFn small = TestFn::bump(1.5, 0.4, Cplx(0.2));
  TraceDensityFn fs = bump_density(small);
  SplitDensities sd2 = epsilon_split(fs, SplitExponent(0.5));
  for (double tau : {1.2, 1.5, 1.8}) {
    CHECK(sd2.low({1.0}, tau) == fs({1.0}, tau));
    CHECK(sd2.high({1.0}, tau) == Cplx(0.0));
  }

  // f = 1: the printed formulas
  TraceDensityFn one = [](const Vec&, double) { return Cplx(1.0); };
  SplitDensities sd3 = epsilon_split(one, SplitExponent(0.5));
  CHECK(sd3.low({1.0}, 0.25).real() == doctest::Approx(0.5));
  CHECK(sd3.high({1.0}, 0.25).real() == doctest::Approx(0.5));
  CHECK(sd3.low({1.0}, 4.0).real() == doctest::Approx(1.0));
  CHECK(sd3.high({1.0}, 4.0).real() == doctest::Approx(0.0));
}

TEST_CASE("split pieces certify at the shifted weak degrees") {
  TestFn h = TestFn::bump(0.0, 1.5, Cplx(2.0));
  SplitDensities sd = epsilon_split(bump_density(h), SplitExponent(0.31));
  DensityOptions topt;
  topt.tol = 1e-9;
  TraceOracle w_low = trace_density(1, sd.low, Interval{-1.5, 1.5}, topt);
  TraceOracle w_high = trace_density(1, sd.high, Interval{-1.5, 1.5}, topt);
  PolarOptions copt;
  CHECK(certify_trace_degree(w_low, 1.0 + 0.31, copt).holds);
  CHECK(certify_trace_degree(w_high, 1.0 - 0.31, copt).holds);
  // the low piece does NOT certify above its rate
  CHECK(!certify_trace_degree(w_low, 1.0 + 0.9, copt).holds);
}

TEST_CASE("single admissible piece reduces to the canonical extension") {
  TestFn h = TestFn::bump(0.25, 1.0);
  DensityOptions topt;
  TraceOracle w = trace_density(1, bump_density(h), h.support(), topt);
  DeclaredDecomposition decomp;
  decomp.n = 1;
  decomp.pieces.push_back({w, deg(1), bump_density(h), h.support()});
  TemperedExtension ext = extend_tempered(decomp, deg(1, 2));
  CHECK(ext.canonical);
  CHECK(ext.pieces.size() == 1);

  TestFn f = TestFn::bump(0.8, 1.2);
  SphereLineFn g = SphereLineFn::isotropic(1, TestFn::bump(0.2, 0.7));
  Pairing via_pipeline = ext.pair(f, g);
  Pairing via_canonical = canonical_extend(PolarTrace{w, deg(1), false}, deg(1, 2), f, g);
  CHECK(std::abs(via_pipeline.value - via_canonical.value) <=
        1e-9 * (1.0 + std::abs(via_canonical.value)));
}

TEST_CASE("forbidden degree triggers the split; the sum is homogeneous") {
  // c = 1 trace with a = -1: c + a = 0 is forbidden; the split moves the
  // pieces to 1 +/- eps and both extend
  TestFn h = TestFn::bump(0.25, 1.0);
  DensityOptions topt;
  TraceOracle w = trace_density(1, bump_density(h), h.support(), topt);
  DeclaredDecomposition decomp;
  decomp.n = 1;
  decomp.pieces.push_back({w, deg(1), bump_density(h), h.support()});
  const RationalDegree a = deg(-1);
  ExtendOptions xopt;
  xopt.polar.cert_per_decade = 12;  // acceptance runs the standard grid
  TemperedExtension ext = extend_tempered(decomp, a, xopt);
  CHECK(!ext.canonical);
  CHECK(ext.pieces.size() == 2);
  CHECK(ext.chosen_eps == doctest::Approx(0.31));

  PolarTensorFn probe{TestFn::bump(0.7, 1.0), SphereLineFn::isotropic(1, TestFn::bump(0.1, 0.8))};
  const Cplx base = ext.pair(probe.f, probe.g).value;
  for (double s : {0.5, 2.0}) {
    PolarTensorFn pulled = probe.alpha_pullback(s);
    const Cplx d = ext.pair(pulled.f, pulled.g).value - std::pow(s, -1.0) * base;
    CHECK(std::abs(d) <= 1e-7 * (1.0 + std::abs(base)));
  }
}

TEST_CASE("extension is linear across pieces") {
  TestFn h1 = TestFn::bump(0.25, 1.0);
  TestFn h2 = TestFn::bump(-0.3, 0.8, Cplx(0.5));
  DensityOptions topt;
  TraceOracle w1 = trace_density(1, bump_density(h1), h1.support(), topt);
  TraceOracle w2 = trace_density(1, bump_density(h2), h2.support(), topt);
  const RationalDegree a = deg(1, 2);
  TestFn f = TestFn::bump(0.8, 1.2);
  SphereLineFn g = SphereLineFn::isotropic(1, TestFn::bump(0.05, 0.9));

  DeclaredDecomposition both;
  both.n = 1;
  both.pieces.push_back({w1, deg(1), std::nullopt, h1.support()});
  both.pieces.push_back({w2, deg(1), std::nullopt, h2.support()});
  Pairing sum = extend_tempered(both, a).pair(f, g);

  DeclaredDecomposition only1, only2;
  only1.n = only2.n = 1;
  only1.pieces.push_back({w1, deg(1), std::nullopt, h1.support()});
  only2.pieces.push_back({w2, deg(1), std::nullopt, h2.support()});
  const Cplx parts = extend_tempered(only1, a).pair(f, g).value +
                     extend_tempered(only2, a).pair(f, g).value;
  CHECK(std::abs(sum.value - parts) <= 1e-7 * (1.0 + std::abs(parts)));
}

TEST_CASE("two epsilon choices differ only on the boundary") {
  TestFn h = TestFn::bump(0.25, 1.0);
  DensityOptions topt;
  TraceOracle w = trace_density(1, bump_density(h), h.support(), topt);
  const RationalDegree a = deg(-1);  // c + a = 0: forbidden, split engages

  auto build_with = [&](double eps) {
    DeclaredDecomposition decomp;
    decomp.n = 1;
    decomp.pieces.push_back({w, deg(1), bump_density(h), h.support()});
    ExtendOptions opt;
    opt.forced_eps = eps;
    opt.polar.cert_per_decade = 12;
    return extend_tempered(decomp, a, opt);
  };
  TemperedExtension e1 = build_with(0.31);
  TemperedExtension e2 = build_with(0.57);

  // probes vanishing near r = 0: the two extensions agree (difference is
  // supported on the boundary)
  TestFn f_away = TestFn::bump(2.0, 1.2);
  SphereLineFn g = SphereLineFn::isotropic(1, TestFn::bump(0.15, 0.8));
  const Cplx v1 = e1.pair(f_away, g).value;
  const Cplx v2 = e2.pair(f_away, g).value;
  CHECK(std::abs(v1 - v2) <= 1e-7 * (1.0 + std::abs(v1)));
}

TEST_CASE("inconsistent declared decompositions are rejected") {
  TestFn h = TestFn::bump(0.25, 1.0);
  DensityOptions topt;
  TraceOracle w = trace_density(1, bump_density(h), h.support(), topt);
  DeclaredDecomposition decomp;
  decomp.n = 1;
  decomp.pieces.push_back({w, deg(1), std::nullopt, h.support()});
  decomp.target = w.scaled(Cplx(2.0));  // pieces sum to half the target
  CHECK_THROWS_AS(extend_tempered(decomp, deg(1, 2)), DecompositionError);
}
