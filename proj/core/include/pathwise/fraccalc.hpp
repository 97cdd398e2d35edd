#pragma once

#include <cstddef>
#include <vector>

#include "pathwise/holder.hpp"
#include "pathwise/path.hpp"

namespace pathwise {

// Per-node samples of a fractional derivative over a window.  values[j] sits
// at time t_first + j*dt; the singular endpoint of the window is excluded
// (T1 for the left derivative, T2 for the right one).
struct FracDerivSamples {
  double t_first = 0.0;
  double dt = 0.0;
  std::vector<double> values;

  double time(std::size_t j) const { return t_first + static_cast<double>(j) * dt; }
};

// Grid family of linear maps V -> V, either diagonal (data[k*cols + i] is the
// i-th diagonal entry at node k) or dense row-major (data[(k*rows + j)*cols + i]
// is entry (j,i) at node k).
struct OperatorPath {
  TimeGrid grid;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool diagonal = true;
  std::vector<double> data;

  static OperatorPath make_diagonal(const TimeGrid& grid, std::size_t modes);
  static OperatorPath make_dense(const TimeGrid& grid, std::size_t rows, std::size_t cols);

  // Pure relabelling Z(. + tau): shifts the grid, keeps every value; tau must
  // be a grid node offset from t0 (same convention as wiener_shift).
  OperatorPath time_shift(double tau) const;
};

// Left Weyl-Marchaud derivative of order `order` in (0,1), uncompensated form
//   D[r] = ( z(r)/(r-T1)^order
//            + order * Int_{T1}^{r} (z(r)-z(q)) (r-q)^(-order-1) dq ) / Gamma(1-order)
// sampled at window nodes r > T1.  The path is reconstructed piecewise-
// linearly and the singular kernel is integrated by exact per-cell moments,
// so constants and linear ramps are reproduced to rounding.
FracDerivSamples weyl_left_derivative(const ScalarPath& z, double order, const Window& window);

// Right-sided companion (the real bracket of the compensated right derivative,
// with the complex (-1)^order factor dropped):
//   D[r] = ( (w(r)-w(T2))/(T2-r)^order
//            + order * Int_{r}^{T2} (w(r)-w(q)) (q-r)^(-order-1) dq ) / Gamma(1-order)
// sampled at window nodes r < T2.
FracDerivSamples weyl_right_derivative(const ScalarPath& omega, double order, const Window& window);

// Pathwise integral over the window via the fractional-derivative composition
//   Int z d(zeta) = - Int_{T1}^{T2} L[r] * R[r] dr,
// L the order-alpha left derivative of z, R the order-(1-alpha) right bracket
// of zeta; the global minus realizes the (-1)^alpha (-1)^(1-alpha) pairing and
// makes z == 1 reproduce zeta(T2) - zeta(T1) with positive sign.  A bitwise-
// constant integrand short-circuits to exactly that product; single-cell
// windows use the left-point product rule.
double zahle_integral(const ScalarPath& z, const ScalarPath& zeta,
                      const HolderParams& params, const Window& window);

// Vector version: component j accumulates sum_i Int (Z)_{ji} d(omega_i).
std::vector<double> zahle_integral(const OperatorPath& Z, const HilbertPath& omega,
                                   const HolderParams& params, const Window& window);

// Left-point Riemann-Stieltjes sum over the window (independent oracle).
double riemann_stieltjes(const ScalarPath& z, const ScalarPath& zeta, const Window& window);

// | Int_{t1}^{t2} + Int_{t2}^{t3} - Int_{t1}^{t3} | for the pathwise integral.
double additivity_defect(const ScalarPath& z, const ScalarPath& zeta,
                         const HolderParams& params, double t1, double t2, double t3);

// Euclidean distance between Int_{T1}^{T2} Z d(omega) and the same integral of
// the relabelled pair (Z(.+tau), theta_tau omega) over the shifted window.
// With lattice-valued drivers both computations traverse identical numbers, so
// this is exactly zero.
double shift_covariance_defect(const OperatorPath& Z, const HilbertPath& omega, double tau,
                               const HolderParams& params, const Window& window);

namespace detail {

// Exact per-cell moments of a one-sided Weyl kernel of the given order on a
// uniform grid, indexed by lag.  P[l] = (l*dt)^(-order) (boundary weights);
// A[l], B[l] integrate the kernel and its first moment over the cell at lag l
// (left kernel: lags >= 2; right kernel: lags >= 1); adj is the closed form of
// the cell adjacent to the evaluation point, where the piecewise-linear
// compensation cancels the singularity.  Shared between the standalone
// integral routines and the solver's fixed-point engine.
struct WeylMoments {
  double order = 0.0;
  double inv_gamma = 0.0;
  double adj = 0.0;
  std::vector<double> P;
  std::vector<double> A;
  std::vector<double> B;
};

WeylMoments left_weyl_moments(double order, double dt, std::size_t cells);
WeylMoments right_weyl_moments(double order, double dt, std::size_t cells);

// Raw-array kernels behind the public derivative routines.  `values` holds
// cells + 1 strided node samples.  The left kernel writes out[m-1] = left
// derivative at node m (m = 1..cells, tables from left_weyl_moments); the
// right kernel writes out[m] = right bracket at node m (m = 0..cells-1,
// tables from right_weyl_moments).
void weyl_left_kernel(const double* values, std::size_t stride, std::size_t cells, double dt,
                      const WeylMoments& moments, double* out);
void weyl_right_kernel(const double* values, std::size_t stride, std::size_t cells, double dt,
                       const WeylMoments& moments, double* out);

// Outer product-quadrature given precomputed derivative samples: weight
// (r-T1)^(-alpha) times piecewise-linear (r-T1)^alpha * L[r]*R[r] on interior
// cells, envelope end cells frozen at the first/last interior node.  Exposed
// so tests can drive the quadrature route explicitly (bypassing the
// constant-integrand shortcut).
double outer_quadrature(const std::vector<double>& left, const std::vector<double>& right,
                        std::size_t cells, double dt, double alpha, double beta_prime);

// Quadrature route of zahle_integral with no constant shortcut.
double zahle_integral_quadrature(const ScalarPath& z, const ScalarPath& zeta,
                                 const HolderParams& params, const Window& window);

}  // namespace detail

}  // namespace pathwise
