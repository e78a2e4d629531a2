#pragma once

#include <cstdint>
#include <random>

#include "homext/testfn.hpp"

namespace homext {

// Deterministic uniform doubles straight from the mt19937_64 bit stream.
// std::uniform_real_distribution is implementation-defined, which would break
// byte-identical reports across toolchains; this does not.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + int(uniform() * double(hi - lo + 1)) % (hi - lo + 1);
  }

 private:
  std::mt19937_64 gen_;
};

struct ProbeRanges {
  double center_lo = -2.0, center_hi = 2.0;
  double width_lo = 0.4, width_hi = 1.2;
  int max_power = 2;
};

inline TestFn random_bump(SeededRng& rng, const ProbeRanges& r = {}) {
  const double c = rng.uniform(r.center_lo, r.center_hi);
  const double w = rng.uniform(r.width_lo, r.width_hi);
  const int m = rng.uniform_int(0, r.max_power);
  const double amp = rng.uniform(0.5, 1.5);
  return TestFn::bump(c, w, Cplx(amp), m);
}

// Bump whose support stays inside (0, inf).
inline TestFn random_positive_bump(SeededRng& rng, double lo = 0.4, double hi = 4.0) {
  const double c = rng.uniform(lo + 0.3, hi);
  const double w = rng.uniform(0.2, std::min(0.9 * (c - lo), 1.5));
  const double amp = rng.uniform(0.5, 1.5);
  return TestFn::bump(c, w, Cplx(amp));
}

// Bump with a prescribed-sign support offset from zero: support in
// [gap, ...] or [..., -gap] depending on the drawn sign.
inline TestFn random_offset_bump(SeededRng& rng, double gap = 0.3) {
  TestFn b = random_positive_bump(rng, gap, 3.0);
  if (rng.uniform() < 0.5) return b.scaled_arg(-1.0);
  return b;
}

inline ProductTestFn random_product_probe(SeededRng& rng, int n, const ProbeRanges& xr = {},
                                          const ProbeRanges& tr = {}) {
  std::vector<TestFn> xs;
  for (int i = 0; i < n; ++i) xs.push_back(random_bump(rng, xr));
  return ProductTestFn::tensor(n, std::move(xs), random_bump(rng, tr));
}

// Probe supported away from the singular fiber X = 0: every X-factor's support
// avoids zero.
inline ProductTestFn random_punctured_probe(SeededRng& rng, int n, const ProbeRanges& tr = {}) {
  std::vector<TestFn> xs;
  for (int i = 0; i < n; ++i) xs.push_back(random_offset_bump(rng, 0.3));
  return ProductTestFn::tensor(n, std::move(xs), random_bump(rng, tr));
}

}  // namespace homext
