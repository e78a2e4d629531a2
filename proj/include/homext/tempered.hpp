#pragma once

#include <optional>
#include <vector>

#include "homext/polar.hpp"

namespace homext {

/* Decomposition of traces into weakly homogeneous pieces and the piecewise
   extension pipeline. The constructive step is the epsilon split of a
   continuous bounded density f >= 0 on S^{n-1} x R:

     f_eps  = min(|t|^eps, f),   f_-eps = max(f - |t|^eps, 0)

   which sum to f pointwise exactly and move the gamma weak degree from the
   base value to base +/- eps. Complex densities split through the positive
   and negative parts of the real and imaginary parts. General distributions
   enter as user-declared decompositions; the split is applied when a piece
   sits at a forbidden degree for the canonical extension. */

struct SplitExponent {
  double eps;
  explicit SplitExponent(double e) : eps(e) {
    if (!(e > 0.0 && e < 1.0)) throw PreconditionError("split exponent must lie in (0,1)");
  }
};

using TraceDensityFn = std::function<Cplx(const Vec&, double)>;

struct SplitDensities {
  TraceDensityFn low;   // f_eps: vanishes at the base at rate eps
  TraceDensityFn high;  // f_-eps: carried by the region where f exceeds the ramp
};

inline SplitDensities epsilon_split(const TraceDensityFn& f, const SplitExponent& e) {
  const double eps = e.eps;
  auto part = [](double v) { return v > 0.0 ? v : 0.0; };
  auto split_one = [eps, part](double fv, double tau, bool low_part) {
    const double ramp = std::pow(std::abs(tau), eps);
    return low_part ? std::min(ramp, fv) : part(fv - ramp);
  };
  SplitDensities out;
  out.low = [f, split_one, part](const Vec& om, double tau) {
    const Cplx v = f(om, tau);
    // four-part split: positive/negative parts of real and imaginary parts
    return Cplx(split_one(part(v.real()), tau, true) - split_one(part(-v.real()), tau, true),
                split_one(part(v.imag()), tau, true) - split_one(part(-v.imag()), tau, true));
  };
  out.high = [f, split_one, part](const Vec& om, double tau) {
    const Cplx v = f(om, tau);
    return Cplx(split_one(part(v.real()), tau, false) - split_one(part(-v.real()), tau, false),
                split_one(part(v.imag()), tau, false) - split_one(part(-v.imag()), tau, false));
  };
  return out;
}

struct DecompPiece {
  TraceOracle w;
  RationalDegree c;
  // present when the piece is a continuous bounded density (splittable)
  std::optional<TraceDensityFn> density;
  Interval tau_support{-1.0, 1.0};
};

struct DeclaredDecomposition {
  int n = 1;
  std::vector<DecompPiece> pieces;
  // optional target the sum of pieces must reproduce on probes
  std::optional<TraceOracle> target;
};

struct TemperedExtension {
  std::vector<CanonicalExtension> pieces;
  bool canonical = true;   // false when an epsilon split was applied
  double chosen_eps = 0.0;

  Pairing pair(const TestFn& f, const SphereLineFn& g) const {
    Pairing acc;
    for (const auto& e : pieces) {
      Pairing p = e.pair(f, g);
      acc.value += p.value;
      acc.err += p.err;
    }
    return acc;
  }

  Cplx defect(const PolarTensorFn& probe, double s, Cplx a) const {
    PolarTensorFn pulled = probe.alpha_pullback(s);
    return pair(pulled.f, pulled.g).value - std::pow(Cplx(s), a) * pair(probe.f, probe.g).value;
  }
};

struct ExtendOptions {
  PolarOptions polar;
  double consistency_tol = 1e-7;
  int consistency_probes = 4;
  // candidates for dodging forbidden degrees; the first collision-free one wins
  std::vector<double> eps_candidates{0.31, 0.43, 0.57};
  // force a specific epsilon (testing non-canonicity); 0 = automatic
  double forced_eps = 0.0;
};

inline bool forbidden_sum(const RationalDegree& c, const RationalDegree& a) {
  if (c.exact && a.exact) return (c.rat + a.rat).is_nonpositive_integer();
  const double sum = c.real() + a.real();
  return sum <= 1e-9 && std::abs(sum - std::round(sum)) < 1e-9;
}

/* Extension of a declared decomposition: every piece with an admissible
   degree extends canonically; pieces at forbidden degrees are epsilon-split
   first (possible only for density-backed pieces). The result is flagged
   non-canonical whenever a split was applied. */
inline TemperedExtension extend_tempered(const DeclaredDecomposition& decomp,
                                         const RationalDegree& a,
                                         const ExtendOptions& opt = {}) {
  if (decomp.pieces.empty()) throw DecompositionError("empty decomposition");
  const int n = decomp.n;

  if (decomp.target) {
    for (const auto& probe : trace_probes(n, opt.consistency_probes, 555)) {
      Cplx sum(0.0);
      for (const auto& p : decomp.pieces) sum += p.w.pair(probe).value;
      const Cplx want = decomp.target->pair(probe).value;
      if (std::abs(sum - want) > opt.consistency_tol * (1.0 + std::abs(want)))
        throw DecompositionError("declared pieces do not reproduce the target trace on probes");
    }
  }

  // pieces at forbidden degrees get split; choose an epsilon so that every
  // shifted degree dodges the forbidden set
  std::vector<bool> needs_split(decomp.pieces.size(), false);
  bool any_forbidden = false;
  for (size_t i = 0; i < decomp.pieces.size(); ++i) {
    needs_split[i] = forbidden_sum(decomp.pieces[i].c, a);
    any_forbidden = any_forbidden || needs_split[i];
  }
  double eps = 0.0;
  if (any_forbidden) {
    if (opt.forced_eps > 0.0) {
      eps = opt.forced_eps;
    } else {
      for (double cand : opt.eps_candidates) {
        bool ok = true;
        for (size_t i = 0; i < decomp.pieces.size(); ++i) {
          if (!needs_split[i]) continue;
          const double base = decomp.pieces[i].c.real() + a.real();
          for (double shifted : {base + cand, base - cand})
            if (shifted <= 1e-9 && std::abs(shifted - std::round(shifted)) < 1e-9) ok = false;
        }
        if (ok) {
          eps = cand;
          break;
        }
      }
      if (eps == 0.0)
        throw DecompositionError("no split exponent candidate dodges the forbidden degrees");
    }
  }

  TemperedExtension out;
  DensityOptions topt;
  topt.tol = opt.polar.tol;
  for (size_t i = 0; i < decomp.pieces.size(); ++i) {
    const auto& p = decomp.pieces[i];
    if (!needs_split[i]) {
      out.pieces.emplace_back(PolarTrace{p.w, p.c, false}, a, opt.polar);
      continue;
    }
    if (!p.density)
      throw DecompositionError(
          "piece at a forbidden degree is not a bounded density; no constructive split");
    SplitDensities sd = epsilon_split(*p.density, SplitExponent(eps));
    TraceOracle w_low = trace_density(n, sd.low, p.tau_support, topt);
    TraceOracle w_high = trace_density(n, sd.high, p.tau_support, topt);
    RationalDegree c_low = RationalDegree::approx(Cplx(p.c.real() + eps, 0.0));
    RationalDegree c_high = RationalDegree::approx(Cplx(p.c.real() - eps, 0.0));
    out.pieces.emplace_back(PolarTrace{w_low, c_low, false}, a, opt.polar);
    out.pieces.emplace_back(PolarTrace{w_high, c_high, false}, a, opt.polar);
    out.canonical = false;
    out.chosen_eps = eps;
  }
  return out;
}

}  // namespace homext
