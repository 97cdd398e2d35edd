#pragma once

#include <cstdint>
#include <vector>

#include "pathwise/path.hpp"
#include "pathwise/rng.hpp"

namespace pathwise {

// Sampling configuration for fractional Brownian motion on a uniform grid over
// [t_start, t_end] with `steps` cells.  The grid must contain 0 as a node
// (t_start <= 0 <= t_end); the constructor-style validate() also re-anchors
// t0 = -i0*dt so the zero node is exact in floating point.
struct FbmConfig {
  double hurst = 0.75;
  double t_start = 0.0;
  double t_end = 1.0;
  std::size_t steps = 1024;
  std::uint64_t seed = 1;

  void validate() const;
  TimeGrid grid() const;            // zero-anchored grid
  std::size_t zero_node() const;    // index of time 0
};

// Trace-class mode weights q_i >= 0 for vector-valued drivers.
struct TraceWeights {
  std::vector<double> q;

  // q_i = (i+1)^-p, the default trace-class profile (p = 2).
  static TraceWeights polynomial(std::size_t modes, double p = 2.0);
  void validate() const;
};

// Autocovariance of unit-step fractional Gaussian noise at integer lag k:
//   r(k) = ((|k|+1)^(2H) - 2|k|^(2H) + ||k|-1|^(2H)) / 2.
double fgn_covariance(double k, double hurst);

// Two-sided fBm covariance  E B(t)B(s) = (|t|^(2H) + |s|^(2H) - |t-s|^(2H)) / 2.
double fbm_covariance(double t, double s, double hurst);

// O(n log n) exact-in-law sampler via circulant embedding of the fGn
// covariance.  Deterministic for fixed config.  Throws numeric_error if the
// embedding has an eigenvalue below -1e-10 * max eigenvalue (tiny negatives
// are clipped to zero).  Values are snapped to the 2^-32 lattice; see
// wiener_shift for why.
ScalarPath sample_fbm_1d(const FbmConfig& config);

// O(n^3) exact-covariance sampler (distributional oracle for the circulant
// route).  Node cap keeps the dense factorization honest; throws
// std::invalid_argument above it and numeric_error on pivot breakdown
// (message names the pivot index).
ScalarPath sample_fbm_cholesky(const FbmConfig& config, std::size_t max_steps = 2048);

// Vector-valued driver: mode i is sqrt(q_i) times an independent scalar fBm
// whose seed is derive_stream_seed(config.seed, i).  q_i = 0 yields an exactly
// zero column.
HilbertPath sample_fbm_hilbert(const FbmConfig& config, const TraceWeights& weights);

// Wiener shift (theta_tau omega)(s) = omega(tau + s) - omega(tau) on the
// relabelled grid [t_start - tau, t_end - tau]; tau must be a grid node.
// For lattice-valued paths (all samplers above) the re-anchoring subtraction
// is exact, so shifts compose bitwise: shift(shift(w,tau),sigma) ==
// shift(w,tau+sigma) on shared nodes.
ScalarPath wiener_shift(const ScalarPath& path, double tau);
HilbertPath wiener_shift(const HilbertPath& path, double tau);

namespace detail {

// Eigenvalues of the circulant embedding (size 2n) of autocovariance r[0..n].
std::vector<double> circulant_embedding_eigenvalues(const std::vector<double>& autocov);

// Stationary Gaussian sequence of length n with autocovariance r[0..n] via the
// embedding above; consumes 2n normals from the stream.
std::vector<double> sample_stationary_gaussian(const std::vector<double>& autocov,
                                               std::size_t n, GaussianStream& stream);

// Snaps x to the 2^-32 lattice (round to nearest).
double snap_to_lattice(double x);

}  // namespace detail

}  // namespace pathwise
