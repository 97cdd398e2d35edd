#pragma once

#include "pathwise/path.hpp"

namespace pathwise {

// Exponent/weight bundle used across the integral and solver layers.
//   beta       : target regularity of solution paths, in (1/2, 1)
//   beta_prime : regularity of the driving path, in (beta, 1)
//   alpha      : fractional-derivative order, in (1 - beta_prime, beta)
//   rho        : exponential weight rate, >= 0
struct HolderParams {
  double beta = 0.55;
  double beta_prime = 0.75;
  double alpha = 0.45;
  double rho = 0.0;

  void validate() const;  // throws std::invalid_argument on violation
};

// The four norms of one path over one window, at fixed beta/rho.
struct NormReport {
  double sup_norm = 0.0;         // sup |u(s)|
  double holder_seminorm = 0.0;  // sup |u(t)-u(s)| / (t-s)^beta
  double modified_norm = 0.0;    // sup |u| + sup (s-T1)^beta |u(t)-u(s)|/(t-s)^beta
  double weighted_norm = 0.0;    // modified norm with e^(-rho (.-T1)) weights
  double beta = 0.0;
  double rho = 0.0;
};

// Pair-supremum norms on a grid window.  Windows with at most 4096 cells are
// scanned over all O(n^2) node pairs; larger windows restrict to dyadic lags
// (t - s in {dt, 2dt, 4dt, ...}) plus every pair touching a window endpoint.
// The full scan is the oracle for the restricted scheme (see tests).

double sup_norm(const ScalarPath& path, const Window& window);
double sup_norm(const HilbertPath& path, const Window& window);

double holder_seminorm(const ScalarPath& path, double beta, const Window& window);
double holder_seminorm(const HilbertPath& path, double beta, const Window& window);

// sup norm + seminorm (the full beta-Holder norm).
double holder_norm(const ScalarPath& path, double beta, const Window& window);
double holder_norm(const HilbertPath& path, double beta, const Window& window);

// Modified norm: sup |u| + sup_{s>T1} (s-T1)^beta |u(t)-u(s)|/(t-s)^beta.
double modified_norm(const ScalarPath& path, double beta, const Window& window);
double modified_norm(const HilbertPath& path, double beta, const Window& window);

// Weighted modified norm:
//   sup e^(-rho(s-T1)) |u(s)| + sup (s-T1)^beta e^(-rho(t-T1)) |u(t)-u(s)|/(t-s)^beta.
// rho = 0 reproduces modified_norm bitwise.
double weighted_norm(const ScalarPath& path, double beta, double rho, const Window& window);
double weighted_norm(const HilbertPath& path, double beta, double rho, const Window& window);

NormReport make_norm_report(const ScalarPath& path, const HolderParams& params, const Window& window);
NormReport make_norm_report(const HilbertPath& path, const HolderParams& params, const Window& window);

// Regression estimate of the path's Holder exponent: slope of log RMS
// increment against log lag over dyadic lags (lag <= span/4).
double dyadic_exponent_estimate(const ScalarPath& path);

// Forces the restricted (dyadic) pair enumeration regardless of window size;
// exists so tests can compare it against the full scan on moderate windows.
double holder_seminorm_dyadic(const ScalarPath& path, double beta, const Window& window);

}  // namespace pathwise
