#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "pathwise/coefficients.hpp"
#include "pathwise/fraccalc.hpp"
#include "pathwise/holder.hpp"
#include "pathwise/path.hpp"
#include "pathwise/semigroup.hpp"

namespace pathwise {

// Mild evolution problem u(t) = S(t)u0 + Int_0^t S(t-r) G(u(r)) domega(r) on
// [0, horizon].  The driver grid must contain 0 and horizon as nodes with
// exactly `steps` cells between them (it may extend beyond on either side;
// the extra nodes are ignored by the solver and consumed by Wiener shifts).
struct MildProblem {
  SpectralOperator op;
  DiagonalNemytskii G;
  HilbertPath omega;
  std::vector<double> u0;
  HolderParams params;
  double horizon = 1.0;
  std::size_t steps = 0;

  void validate() const;  // throws std::invalid_argument
  TimeGrid solution_grid() const;     // t0 = 0, dt from the driver, steps+1 nodes
  IndexWindow driver_window() const;  // driver node range of [0, horizon]
  double driver_seminorm() const;     // |||omega||| in the beta_prime seminorm on [0, horizon]
};

struct SolveOptions {
  double tol = 1e-9;
  std::size_t max_iterations = 200;
  double rho_override = -1.0;           // >= 0: use this weight instead of choose_rho
  double map_constant_override = -1.0;  // > 0: skip calibration
  bool constant_initial_iterate = false;  // start Picard from u == u0 instead of S(.)u0
  bool force_direct_route = false;  // disable the semigroup factorization in the
                                    // fixed-point engine (test hook; cost grows
                                    // cubically when the decay window >= grid)
};

struct RhoChoice {
  double rho = 0.0;
  double K = 0.0;      // contraction modulus at rho
  double product = 0.0;  // c_T * |||omega||| * K
};

struct SolveDiagnostics {
  double rho = 0.0;
  double K_rho = 0.0;
  double map_constant = 0.0;      // c_T fed to choose_rho (calibrated or overridden)
  double driver_seminorm = 0.0;
  std::size_t iterations = 0;
  std::vector<double> contraction_ratios;  // successive weighted-distance ratios
  double residual_weighted = 0.0;          // ||u - T(u)|| in the rho-weighted norm
  NormReport norm_report;                  // norms of the solution at the chosen rho
  std::vector<double> regularity;          // per-node |u(t_k)| in V_beta
  bool converged = false;
};

// One application of the fixed-point map T(u)(t_k) = S(t_k)u0 + integral term,
// evaluated on every node of the solution grid.  u must live on that grid;
// node 0 of the result equals u0 exactly.  The initial value is taken from
// `u0_override` when nonempty (the contraction certification varies it), else
// from the problem.
HilbertPath fixed_point_map(const MildProblem& problem, const HilbertPath& u,
                            const SolveOptions& options = {},
                            const std::vector<double>& u0_override = {});

// K(rho) = sup_{t in [0,T]} t^d Int_0^1 e^(-rho t(1-v)) v^a (1-v)^b dv.
// Requires a > -1, b > -1, a + b >= -1, d > 0, T > 0, rho >= 0.  rho = 0
// returns T^d B(a+1, b+1) exactly; otherwise the inner integral uses exact
// incomplete-Beta cell moments against piecewise-linear e^(-rho t w) on a
// geometric mesh, and the outer sup a log-grid scan plus golden-section
// refinement.
double kfun(double rho, double a, double b, double d, double T);

// The instance the contraction argument needs: kfun(rho, -alpha, alpha - 1,
// beta_prime - beta, T).
double contraction_modulus(const HolderParams& params, double rho, double T);

// Smallest rho on the doubling grid {1, 2, 4, ...} with
// c_T * |||omega||| * K(rho) < 1/2.  Throws numeric_error if none <= 2^64
// works (pathological calibration).
RhoChoice choose_rho(const MildProblem& problem, double c_T);

// Calibrated constants (observed ratio aggregate * 1.5 over `draws` random
// Hoelder paths; deterministic in seed).  The map constant measures
// ||T_0(u)|| <= c_T |||omega||| K(rho) (1 + ||u||) with zero initial data;
// the contraction constant measures the pairwise version
// ||T(u1) - T(u2)|| <= c_T |||omega||| (1 + ||u1||~ + ||u2||~) K(rho) ||u1 - u2||.
// solve_mild feeds the Median contraction constant to choose_rho (a typical
// ratio is what the fixed-point argument needs).  Certification against
// held-out draws should use Max: the per-pair ratios spread by a factor of
// about two around the median, so a median-based constant leaves the tail
// uncovered.
enum class CalibrationAggregate { Median, Max };

double calibrate_map_constant(const MildProblem& problem, double rho, std::size_t draws,
                              std::uint64_t seed,
                              CalibrationAggregate aggregate = CalibrationAggregate::Median);
double calibrate_contraction_constant(const MildProblem& problem, double rho,
                                      std::size_t pairs, std::uint64_t seed,
                                      CalibrationAggregate aggregate = CalibrationAggregate::Median);

// Picard iteration from S(.)u0 in the rho-weighted modified norm until the
// successive distance drops below tol (then the recorded residual is below
// tol as well) or max_iterations is hit.  Throws numeric_error on divergence
// (three consecutive non-contracting steps) or non-convergence.
std::pair<HilbertPath, SolveDiagnostics> solve_mild(const MildProblem& problem,
                                                    const SolveOptions& options = {});

// Certification reports.  Each compares a computed left side against the
// corresponding constant-bearing right side; ratio <= 1 passes.

struct MapBoundRow {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct MapBoundReport {
  std::vector<MapBoundRow> rows;
  double max_ratio = 0.0;
  bool pass = false;
  double c_T = 0.0;
  double c_init = 0.0;  // constant on the |u0| term
  double rho = 0.0;
  double K = 0.0;
  double driver_seminorm = 0.0;
};

// ||T(u)||_{beta,rho,~} <= c_T |||omega||| K(rho) (1 + ||u||_{beta,rho,~})
// + c_init |u0| over `draws` random paths.
MapBoundReport map_bound_certify(const MildProblem& problem, double c_T, double rho,
                                 std::size_t draws, std::uint64_t seed);

// ||T(u1) - T(u2)||_{beta,rho,~} <= c_T |||omega||| (1 + ||u1||_{beta,~} +
// ||u2||_{beta,~}) K(rho) ||u1 - u2||_{beta,rho,~} + c_init |u01 - u02| for
// one pair; initial values are read from the paths' node 0.
MapBoundRow contraction_certify(const MildProblem& problem, const HilbertPath& u1,
                                const HilbertPath& u2, double c_T, double rho);

// Random beta-Hoelder path on the problem's solution grid (fractional
// Brownian sample, Hurst = problem beta_prime, unit trace weights scaled by
// `scale`); the corpus behind calibration and certification draws.
HilbertPath random_holder_path(const MildProblem& problem, double scale, std::uint64_t seed);

// Left Weyl derivative of r -> S(t-r)G(u(r)) at interior nodes of [0, t],
// compared against the envelope c (1 + ||u||_{beta,~}) r^(-alpha)
// (1 + r^beta (t-r)^(-beta)).
struct EnvelopeReport {
  std::vector<double> r;
  std::vector<double> lhs;       // V-norm of the derivative at r
  std::vector<double> envelope;  // bound with the supplied constant
  double fitted_constant = 0.0;  // smallest c making every row pass
  double max_ratio = 0.0;
  bool pass = false;
};

EnvelopeReport integrand_derivative_envelope(const MildProblem& problem, const HilbertPath& u,
                                             double t, double c);

// Per-node |u(t_k)|_{V_beta} of a solved path.
std::vector<double> regularity_values(const MildProblem& problem, const HilbertPath& u);

// |phi(t+tau, omega, u0) - phi(t, theta_tau omega, phi(tau, omega, u0))| in V.
// t and tau must be grid-aligned and t + tau <= horizon.  Degenerate t = 0 or
// tau = 0 return exactly 0 (identical deterministic solves).
double cocycle_defect(const MildProblem& problem, double t, double tau,
                      const SolveOptions& options = {});

}  // namespace pathwise
