#include "pathwise/fbm.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "pathwise/errors.hpp"

namespace pathwise {

namespace {

constexpr double kLattice = 4294967296.0;  // 2^32

}  // namespace

void FbmConfig::validate() const {
  if (!(hurst > 0.0) || !(hurst < 1.0)) {
    throw std::invalid_argument("FbmConfig: hurst must lie in (0,1)");
  }
  if (steps < 1) throw std::invalid_argument("FbmConfig: need at least one step");
  if (!(t_start < t_end)) throw std::invalid_argument("FbmConfig: need t_start < t_end");
  if (!(t_start <= 0.0) || !(0.0 <= t_end)) {
    throw std::invalid_argument("FbmConfig: horizon must contain 0");
  }
  const double dt = (t_end - t_start) / static_cast<double>(steps);
  const double raw = -t_start / dt;
  const long long i0 = std::llround(raw);
  if (std::abs(static_cast<double>(i0) * dt + t_start) > 1e-9 * std::max(1.0, std::abs(t_start))) {
    throw std::invalid_argument("FbmConfig: 0 is not a grid node (adjust steps or horizon)");
  }
}

TimeGrid FbmConfig::grid() const {
  validate();
  TimeGrid g;
  g.dt = (t_end - t_start) / static_cast<double>(steps);
  g.nodes = steps + 1;
  const long long i0 = std::llround(-t_start / g.dt);
  g.t0 = -(static_cast<double>(i0) * g.dt);  // zero node exact by construction
  return g;
}

std::size_t FbmConfig::zero_node() const {
  validate();
  const double dt = (t_end - t_start) / static_cast<double>(steps);
  return static_cast<std::size_t>(std::llround(-t_start / dt));
}

TraceWeights TraceWeights::polynomial(std::size_t modes, double p) {
  TraceWeights w;
  w.q.resize(modes);
  for (std::size_t i = 0; i < modes; ++i) {
    w.q[i] = std::pow(static_cast<double>(i + 1), -p);
  }
  return w;
}

void TraceWeights::validate() const {
  if (q.empty()) throw std::invalid_argument("TraceWeights: no modes");
  for (double v : q) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("TraceWeights: weights must be finite and >= 0");
    }
  }
}

double fgn_covariance(double k, double hurst) {
  if (!(hurst > 0.0) || !(hurst < 1.0)) {
    throw std::invalid_argument("fgn_covariance: hurst must lie in (0,1)");
  }
  const double a = std::abs(k);
  const double twoH = 2.0 * hurst;
  return 0.5 * (std::pow(a + 1.0, twoH) - 2.0 * std::pow(a, twoH) + std::pow(std::abs(a - 1.0), twoH));
}

double fbm_covariance(double t, double s, double hurst) {
  if (!(hurst > 0.0) || !(hurst < 1.0)) {
    throw std::invalid_argument("fbm_covariance: hurst must lie in (0,1)");
  }
  const double twoH = 2.0 * hurst;
  return 0.5 * (std::pow(std::abs(t), twoH) + std::pow(std::abs(s), twoH) - std::pow(std::abs(t - s), twoH));
}

namespace detail {

double snap_to_lattice(double x) {
  return std::nearbyint(x * kLattice) / kLattice;
}

std::vector<double> circulant_embedding_eigenvalues(const std::vector<double>& autocov) {
  if (autocov.size() < 2) {
    throw std::invalid_argument("circulant embedding: need autocovariance up to lag n >= 1");
  }
  const std::size_t n = autocov.size() - 1;
  const std::size_t m = 2 * n;
  std::vector<std::complex<double>> in(m), out(m);
  for (std::size_t j = 0; j <= n; ++j) in[j] = autocov[j];
  for (std::size_t j = 1; j < n; ++j) in[n + j] = autocov[n - j];

  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m),
                                    reinterpret_cast<fftw_complex*>(in.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()),
                                    FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  std::vector<double> eig(m);
  for (std::size_t j = 0; j < m; ++j) eig[j] = out[j].real();
  return eig;
}

std::vector<double> sample_stationary_gaussian(const std::vector<double>& autocov,
                                               std::size_t n, GaussianStream& stream) {
  if (n == 0) throw std::invalid_argument("sample_stationary_gaussian: empty request");
  if (autocov.size() < n + 1) {
    throw std::invalid_argument("sample_stationary_gaussian: need lags 0..n");
  }
  std::vector<double> eig = circulant_embedding_eigenvalues({autocov.begin(), autocov.begin() + n + 1});
  const std::size_t m = eig.size();

  double max_eig = 0.0;
  for (double v : eig) max_eig = std::max(max_eig, v);
  const double tol = 1e-10 * max_eig;
  for (std::size_t j = 0; j < m; ++j) {
    if (eig[j] < -tol) {
      throw numeric_error("circulant embedding is not nonnegative definite: eigenvalue " +
                          std::to_string(eig[j]) + " at index " + std::to_string(j));
    }
    if (eig[j] < 0.0) eig[j] = 0.0;
  }

  // Hermitian spectrum with independent complex normals; draw order is part of
  // the determinism contract (index 0, pairs 1..m/2-1, then m/2).
  std::vector<std::complex<double>> spec(m);
  spec[0] = std::sqrt(eig[0]) * stream.next();
  for (std::size_t j = 1; j < m / 2; ++j) {
    const double scale = std::sqrt(0.5 * eig[j]);
    const double a = stream.next();
    const double b = stream.next();
    spec[j] = {scale * a, scale * b};
    spec[m - j] = std::conj(spec[j]);
  }
  spec[m / 2] = std::sqrt(eig[m / 2]) * stream.next();

  std::vector<std::complex<double>> out(m);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m),
                                    reinterpret_cast<fftw_complex*>(spec.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()),
                                    FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = out[k].real() * norm;
  return x;
}

}  // namespace detail

ScalarPath sample_fbm_1d(const FbmConfig& config) {
  config.validate();
  const TimeGrid grid = config.grid();
  const std::size_t n = config.steps;

  std::vector<double> autocov(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    autocov[k] = fgn_covariance(static_cast<double>(k), config.hurst);
  }
  GaussianStream stream(config.seed);
  const std::vector<double> fgn = detail::sample_stationary_gaussian(autocov, n, stream);

  const double scale = std::pow(grid.dt, config.hurst);
  ScalarPath path;
  path.grid = grid;
  path.values.resize(grid.nodes);
  path.values[0] = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    path.values[k + 1] = path.values[k] + detail::snap_to_lattice(scale * fgn[k]);
  }
  const double anchor = path.values[config.zero_node()];
  for (double& v : path.values) v -= anchor;  // exact: lattice values
  return path;
}

ScalarPath sample_fbm_cholesky(const FbmConfig& config, std::size_t max_steps) {
  config.validate();
  if (config.steps > max_steps) {
    throw std::invalid_argument("sample_fbm_cholesky: steps " + std::to_string(config.steps) +
                                " exceeds dense-factorization cap " + std::to_string(max_steps));
  }
  const TimeGrid grid = config.grid();
  const std::size_t i0 = config.zero_node();
  const std::size_t n = config.steps;  // nonzero nodes

  // Covariance over the nodes != 0, in grid order.
  std::vector<double> times;
  times.reserve(n);
  for (std::size_t k = 0; k < grid.nodes; ++k) {
    if (k != i0) times.push_back(grid.time(k));
  }
  std::vector<double> cov(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      const double v = fbm_covariance(times[a], times[b], config.hurst);
      cov[a * n + b] = v;
      cov[b * n + a] = v;
    }
  }

  // In-place lower Cholesky, reporting the pivot on breakdown.
  for (std::size_t j = 0; j < n; ++j) {
    double d = cov[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= cov[j * n + k] * cov[j * n + k];
    if (!(d > 0.0)) {
      throw numeric_error("sample_fbm_cholesky: factorization failed at pivot " + std::to_string(j) +
                          " (value " + std::to_string(d) + ")");
    }
    const double piv = std::sqrt(d);
    cov[j * n + j] = piv;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = cov[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= cov[i * n + k] * cov[j * n + k];
      cov[i * n + j] = s / piv;
    }
  }

  GaussianStream stream(config.seed);
  std::vector<double> z(n);
  for (double& v : z) v = stream.next();

  ScalarPath path;
  path.grid = grid;
  path.values.assign(grid.nodes, 0.0);
  std::size_t row = 0;
  for (std::size_t k = 0; k < grid.nodes; ++k) {
    if (k == i0) continue;
    double acc = 0.0;
    for (std::size_t c = 0; c <= row; ++c) acc += cov[row * n + c] * z[c];
    path.values[k] = detail::snap_to_lattice(acc);
    ++row;
  }
  return path;
}

HilbertPath sample_fbm_hilbert(const FbmConfig& config, const TraceWeights& weights) {
  config.validate();
  weights.validate();
  const TimeGrid grid = config.grid();
  HilbertPath path = make_hilbert_path(grid, weights.q.size());

  for (std::size_t i = 0; i < weights.q.size(); ++i) {
    if (weights.q[i] == 0.0) continue;  // keep the column exactly zero
    FbmConfig mode_config = config;
    mode_config.seed = derive_stream_seed(config.seed, i);
    const ScalarPath mode = sample_fbm_1d(mode_config);
    const double scale = std::sqrt(weights.q[i]);
    for (std::size_t k = 0; k < grid.nodes; ++k) {
      path.data[k * path.modes + i] = detail::snap_to_lattice(scale * mode.values[k]);
    }
  }
  return path;
}

ScalarPath wiener_shift(const ScalarPath& path, double tau) {
  const std::size_t k = path.grid.index_of(tau);  // throws if tau leaves the horizon
  ScalarPath out;
  out.grid = detail::shift_grid(path.grid, k);
  out.values.resize(path.values.size());
  const double anchor = path.values[k];
  for (std::size_t j = 0; j < path.values.size(); ++j) {
    out.values[j] = path.values[j] - anchor;
  }
  return out;
}

HilbertPath wiener_shift(const HilbertPath& path, double tau) {
  const std::size_t k = path.grid.index_of(tau);
  HilbertPath out;
  out.grid = detail::shift_grid(path.grid, k);
  out.modes = path.modes;
  out.data.resize(path.data.size());
  const double* anchor = path.data.data() + k * path.modes;
  for (std::size_t j = 0; j < path.grid.nodes; ++j) {
    const double* src = path.data.data() + j * path.modes;
    double* dst = out.data.data() + j * path.modes;
    for (std::size_t i = 0; i < path.modes; ++i) dst[i] = src[i] - anchor[i];
  }
  return out;
}

}  // namespace pathwise
