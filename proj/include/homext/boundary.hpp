#pragma once

#include <string>
#include <vector>

#include "homext/dist1d.hpp"
#include "homext/oracle.hpp"
#include "homext/zoom.hpp"

namespace homext {

/* a-homogeneous distributions supported on the singular fiber {0} x R: the
   exact discrepancy between two homogeneous extensions. An element is

     <E, phi> = (-1)^b nu [ lam_- <t_-^{A-1}, psi> + lam_0 <d^d delta, psi>
                            + lam_+ <t_+^{A-1}, psi> ],
     psi(t) = (d_X^beta phi)(0, t),  b = |beta|,  A = -a-b,

   whose alpha-degree bookkeeping forces the time part to have dilation
   degree A. Powers t_pm^{A-1} always have it; a delta derivative d^d delta
   has degree -d, so delta terms are admissible exactly when d = a+b is a
   nonnegative integer. The anomaly-cancellation criterion

     lam_+ + (-1)^{a+b} lam_- = 0

   links the power coefficients whenever A lands in {0,-1,...} (the log
   cases); elsewhere both are free. The constructor refuses combinations
   whose measured scaling defect is nonzero, reporting that defect. */

enum class BoundaryCase { nonintegral, negative, zero, positive };

struct CaseInfo {
  BoundaryCase tag = BoundaryCase::nonintegral;
  bool powers_linked = false;   // lam_- determined by lam_+
  Cplx linkage = Cplx(0.0);     // lam_- = linkage * lam_+ when linked
  bool delta_admissible = false;
  int delta_order = 0;          // d = a+b when admissible
  std::string description;
};

inline CaseInfo classify(const Rational& a, int b) {
  Rational sum = a + Rational(b);
  CaseInfo info;
  if (!sum.is_integer()) {
    info.tag = BoundaryCase::nonintegral;
    info.description = "a+b not an integer: independent t_- and t_+ parts, no delta";
    return info;
  }
  const long long s = sum.num;
  if (s < 0) {
    info.tag = BoundaryCase::negative;
    info.description =
        "a+b a negative integer: regular powers t_pm^{-a-b-1}, independent, no delta";
    return info;
  }
  info.powers_linked = true;
  info.linkage = (s % 2 == 0) ? Cplx(-1.0) : Cplx(1.0);  // lam_+ = -(-1)^{a+b} lam_-
  info.delta_admissible = true;
  info.delta_order = int(s);
  if (s == 0) {
    info.tag = BoundaryCase::zero;
    info.description = "a+b = 0: linked pair -t_-^{-1}/t_+^{-1} plus a free delta_0";
  } else {
    info.tag = BoundaryCase::positive;
    info.description =
        "a+b a positive integer: anomaly-linked t_pm pair plus a free delta derivative";
  }
  return info;
}

struct BoundaryElement {
  int n = 1;
  Rational a;
  std::vector<int> beta;  // normal multi-index, |beta| = b
  Cplx lambda_minus{0.0}, lambda0{0.0}, lambda_plus{0.0};
  Cplx nu{1.0};  // base weight (the base is a point)

  int order_b() const {
    int s = 0;
    for (int m : beta) s += m;
    return s;
  }

  ModelOracle oracle() const {
    BoundaryElement self = *this;
    const int b = order_b();
    const Rational A = -(a + Rational(b));
    RegularizedPower tminus(RationalDegree::exact_rational(A), RegularizedPower::Side::minus);
    RegularizedPower tplus(RationalDegree::exact_rational(A), RegularizedPower::Side::plus);
    CaseInfo info = classify(a, b);
    const double sign = (b % 2 == 0) ? 1.0 : -1.0;
    return ModelOracle::from_tensor(n, [self, b, tminus, tplus, info, sign](const TensorArg& arg) {
      Pairing acc;
      for (const auto& s : arg.summands) {
        Cplx jet(1.0);
        for (int i = 0; i < self.n; ++i)
          jet *= s.x[size_t(i)].derivative(0.0, self.beta[size_t(i)]);
        if (jet == Cplx(0.0)) continue;
        Cplx val(0.0);
        double err = 0.0;
        if (self.lambda_minus != Cplx(0.0)) {
          Pairing p = tminus.pair(s.t);
          val += self.lambda_minus * p.value;
          err += std::abs(self.lambda_minus) * p.err;
        }
        if (self.lambda_plus != Cplx(0.0)) {
          Pairing p = tplus.pair(s.t);
          val += self.lambda_plus * p.value;
          err += std::abs(self.lambda_plus) * p.err;
        }
        if (self.lambda0 != Cplx(0.0) && info.delta_admissible) {
          DeltaDerivative d{info.delta_order};
          val += self.lambda0 * d.pair(s.t).value;
        }
        acc.value += sign * self.nu * jet * val;
        acc.err += std::abs(self.nu * jet) * err;
      }
      return acc;
    });
  }
};

struct MakeElementOptions {
  double refuse_tol = 1e-8;
};

// Measured scaling defect of a candidate element at dilation s = 2, against a
// probe with nonvanishing jets in every slot the element reads.
inline Cplx measured_defect(const BoundaryElement& e) {
  std::vector<TestFn> xs;
  for (int m : e.beta) xs.push_back(TestFn::bump(0.0, 1.0, Cplx(1.0), m));
  // t-bump with all low-order jets nonzero at 0
  TestFn tf = TestFn::bump(0.3, 1.1);
  ProductTestFn phi = ProductTestFn::tensor(e.n, xs, tf);
  ModelOracle u = e.oracle();
  const Cplx av(e.a.to_double(), 0.0);
  Cplx worst(0.0);
  for (double s : {0.5, 2.0}) {
    Cplx d = homogeneity_defect(u, av, ActionKind::alpha, phi, s);
    if (std::abs(d) > std::abs(worst)) worst = d;
  }
  return worst;
}

inline BoundaryElement make_element(int n, const Rational& a, std::vector<int> beta,
                                    Cplx lambda_minus, Cplx lambda0, Cplx lambda_plus,
                                    Cplx nu = Cplx(1.0), const MakeElementOptions& opt = {}) {
  if (int(beta.size()) != n) throw PreconditionError("multi-index dimension mismatch");
  BoundaryElement e;
  e.n = n;
  e.a = a;
  e.beta = std::move(beta);
  e.lambda_minus = lambda_minus;
  e.lambda0 = lambda0;
  e.lambda_plus = lambda_plus;
  e.nu = nu;

  CaseInfo info = classify(a, e.order_b());
  if (lambda0 != Cplx(0.0) && !info.delta_admissible) {
    BoundaryElement bad = e;
    bad.lambda_minus = bad.lambda_plus = Cplx(0.0);
    throw LinkageError("no admissible delta part at this (a, b); measured scaling defect",
                       measured_defect(bad));
  }
  if (info.powers_linked) {
    // anomaly cancellation: lam_+ + (-1)^{a+b} lam_- = 0
    const Cplx residual =
        lambda_plus + (info.delta_order % 2 == 0 ? 1.0 : -1.0) * lambda_minus;
    if (std::abs(residual) > 1e-14 * (1.0 + std::abs(lambda_plus))) {
      BoundaryElement bad = e;
      bad.lambda0 = Cplx(0.0);
      throw LinkageError("power coefficients violate anomaly cancellation; measured log defect",
                         measured_defect(bad));
    }
  }
  std::vector<TestFn> xs;
  for (int m : e.beta) xs.push_back(TestFn::bump(0.0, 1.0, Cplx(1.0), m));
  ProductTestFn probe = ProductTestFn::tensor(n, xs, TestFn::bump(0.3, 1.1));
  const double scale = 1.0 + std::abs(e.oracle().pair(probe).value);
  const Cplx defect = measured_defect(e);
  if (std::abs(defect) > opt.refuse_tol * scale)
    throw LinkageError("constructed element fails its homogeneity probe", defect);
  return e;
}

// Transversal filter: boundary elements with a smooth-density base weight and
// delta-free transversal time part exist iff a+b is a negative integer; the
// admissible generator is the pair lam_+ = 1, lam_- = (-1)^{a+b+1}, whose
// combination restricts to the polynomial t^{-a-b-1} density.
inline bool transversal_filter(const Rational& a, int b) {
  Rational sum = a + Rational(b);
  return sum.is_integer() && sum.num < 0;
}

inline BoundaryElement transversal_generator(int n, const Rational& a, std::vector<int> beta) {
  int b = 0;
  for (int m : beta) b += m;
  if (!transversal_filter(a, b))
    throw PreconditionError("no transversal generator: a+b is not a negative integer");
  const long long s = (a + Rational(b)).num;
  const Cplx lam_minus = ((s + 1) % 2 == 0) ? Cplx(1.0) : Cplx(-1.0);  // (-1)^{a+b+1}
  return make_element(n, a, std::move(beta), lam_minus, Cplx(0.0), Cplx(1.0));
}

}  // namespace homext
