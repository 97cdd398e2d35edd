#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "pathwise/path.hpp"

namespace pathwise {

// Diagonalized generator: the semigroup acts mode-wise as multiplication by
// e^(-lambda_i t).  lambdas must be nonnegative and nondecreasing (lambda = 0
// turns the semigroup into the identity on that mode, the degenerate case the
// solver's constant-coefficient reference solutions exercise).
struct SpectralOperator {
  std::vector<double> lambdas;

  // lambda_i = i^2, i = 1..n_modes (Dirichlet Laplacian spectrum on (0, pi)).
  static SpectralOperator dirichlet_laplacian(std::size_t n_modes);

  std::size_t modes() const { return lambdas.size(); }
  void validate() const;  // throws std::invalid_argument
};

// Coefficient vector tagged with the fractional-power index of the space it
// is measured in: |v|_delta = (sum lambda_i^(2 delta) v_i^2)^(1/2).
struct VdeltaVector {
  std::vector<double> coeffs;
  double delta = 0.0;
};

// Coefficient-wise e^(-lambda_i t).  t < 0 throws.
VdeltaVector apply_semigroup(const SpectralOperator& op, double t, const VdeltaVector& v);
void apply_semigroup_inplace(const SpectralOperator& op, double t, std::vector<double>& coeffs);

double vdelta_norm(const VdeltaVector& v, double delta, const SpectralOperator& op);
double vdelta_norm(const std::vector<double>& coeffs, double delta, const SpectralOperator& op);

// Exact mode suprema of the three operator norms the estimate checks bound.

// sup_i lambda_i^gamma e^(-lambda_i t)   (norm of (-A)^gamma S(t) on V).
double smoothing_norm(const SpectralOperator& op, double gamma, double t);

// sup_i lambda_i^(-d) (1 - e^(-lambda_i t)) with d = sigma - theta
// (norm of S(t) - id from V_(sigma+mu) to V_(theta+mu); mu cancels).
double identity_difference_norm(const SpectralOperator& op, double d, double t);

// sup_i |e^(-l(t-r)) - e^(-l(s-r)) - e^(-l(t-q)) + e^(-l(s-q))|, evaluated in
// the factored form (1-e^(-l(t-s)))(1-e^(-l(r-q)))e^(-l(s-r)) for stability.
double double_difference_norm(const SpectralOperator& op, double q, double r, double s, double t);

// One sample of an estimate check: exact operator norm vs analytic bound.
struct EstimateRow {
  double t = 0.0;  // sample time (largest time of the quadruple for the
                   // double-difference check)
  double exact_norm = 0.0;
  double bound = 0.0;
  double ratio = 0.0;  // exact_norm / bound (0 when bound is infinite)
};

struct EstimateReport {
  std::vector<EstimateRow> rows;
  double constant_used = 0.0;    // analytic constant baked into `bound`
  double fitted_constant = 0.0;  // tightest constant: constant_used * max_ratio
  double max_ratio = 0.0;
  bool pass = false;  // max_ratio <= 1
};

// Smoothing estimate: exact norm <= margin * (gamma/e)^gamma t^(-gamma)
// e^(-lambda_1 t / 2), margin = 2^gamma (the exact continuum envelope with
// decay rate lambda_1/2).  gamma > 0, all sample times > 0.
EstimateReport smoothing_estimate_check(const SpectralOperator& op, double gamma,
                                        const std::vector<double>& t_samples);
double smoothing_envelope_constant(double gamma);  // 2^gamma (gamma/e)^gamma

// Identity-difference estimate: exact norm <= t^(sigma-theta) with sharp
// constant 1.  Requires theta >= 0 and sigma in [theta, 1 + theta]; mu is
// accepted for interface fidelity and cancels in the norm.
EstimateReport hoelder_estimate_check(const SpectralOperator& op, double sigma, double theta,
                                      double mu, const std::vector<double>& t_samples);

// Double-difference estimate over ordered quadruples q <= r <= s <= t:
// exact norm <= ((beta+gamma)/e)^(beta+gamma) (t-s)^beta (r-q)^gamma
// (s-r)^(-(beta+gamma)).  Requires beta, gamma >= 0, beta + gamma <= 1.
EstimateReport double_difference_check(const SpectralOperator& op, double beta, double gamma,
                                       const std::vector<std::array<double, 4>>& quadruples);
double double_difference_constant(double beta, double gamma);

// Sorted uniform draws on [0, t_max]; deterministic in seed.
std::vector<std::array<double, 4>> random_quadruples(std::size_t count, double t_max,
                                                     std::uint64_t seed);

// count >= 2 log-spaced points from t_min to t_max inclusive.
std::vector<double> log_spaced(double t_min, double t_max, std::size_t count);

}  // namespace pathwise
