#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace homext {

using Cplx = std::complex<double>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Derivative order above the configured maximum.
struct UnsupportedOrderError : Error {
  int order;
  explicit UnsupportedOrderError(int ord)
      : Error("derivative order " + std::to_string(ord) + " exceeds supported maximum"), order(ord) {}
};

// Quadrature failed to reach the requested tolerance; carries the best estimate.
struct AccuracyError : Error {
  Cplx best_estimate;
  double err_estimate;
  AccuracyError(const std::string& what, Cplx best, double err)
      : Error(what), best_estimate(best), err_estimate(err) {}
};

// A homogeneity probe found a defect above tolerance.
struct NotHomogeneousError : Error {
  double max_defect;
  NotHomogeneousError(const std::string& what, double defect)
      : Error(what), max_defect(defect) {}
};

// Canonical extension requested at a degree where none exists (c + Re a in -N).
struct ForbiddenDegreeError : Error {
  double degree_sum;
  ForbiddenDegreeError(const std::string& what, double cs)
      : Error(what), degree_sum(cs) {}
};

// Integrand does not follow the certified power law beyond the quadrature window.
struct TailFitError : Error {
  double fitted_exponent;
  double fit_spread;
  TailFitError(const std::string& what, double expo, double spread)
      : Error(what), fitted_exponent(expo), fit_spread(spread) {}
};

// Every probe annihilated the distribution; degree estimation is impossible.
struct DegenerateProbeError : Error {
  using Error::Error;
};

// Coefficients violate the anomaly-cancellation linkage; carries the defect the
// constructor measured for the rejected combination.
struct LinkageError : Error {
  Cplx measured_defect;
  LinkageError(const std::string& what, Cplx defect)
      : Error(what), measured_defect(defect) {}
};

// Declared decomposition does not reproduce its target on probes.
struct DecompositionError : Error {
  using Error::Error;
};

// Argument outside an operation's stated domain (wrong case, wrong support, ...).
struct PreconditionError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace homext
