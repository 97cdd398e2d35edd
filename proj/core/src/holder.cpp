#include "pathwise/holder.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace pathwise {

namespace {

constexpr std::size_t kFullScanCellLimit = 4096;

// Euclidean distance between two nodes of a vector path.
double node_distance(const HilbertPath& p, std::size_t a, std::size_t b) {
  const double* x = p.data.data() + a * p.modes;
  const double* y = p.data.data() + b * p.modes;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.modes; ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double node_magnitude(const HilbertPath& p, std::size_t a) {
  const double* x = p.data.data() + a * p.modes;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.modes; ++i) acc += x[i] * x[i];
  return std::sqrt(acc);
}

// Enumerates the (s, t) index pairs used by the pair suprema: all pairs when
// the window is small enough, dyadic lags plus endpoint-touching pairs above.
template <class Fn>
void for_each_pair(std::size_t first, std::size_t last, Fn&& fn) {
  const std::size_t cells = last - first;
  if (cells <= kFullScanCellLimit) {
    for (std::size_t s = first; s < last; ++s) {
      for (std::size_t t = s + 1; t <= last; ++t) fn(s, t);
    }
    return;
  }
  for (std::size_t lag = 1; lag <= cells; lag *= 2) {
    for (std::size_t s = first; s + lag <= last; ++s) fn(s, s + lag);
    if (lag > cells / 2) break;  // avoid overflow of lag *= 2
  }
  for (std::size_t t = first + 1; t <= last; ++t) fn(first, t);
  for (std::size_t s = first; s < last; ++s) fn(s, last);
}

template <class Fn>
void for_each_dyadic_pair(std::size_t first, std::size_t last, Fn&& fn) {
  const std::size_t cells = last - first;
  for (std::size_t lag = 1; lag <= cells; lag *= 2) {
    for (std::size_t s = first; s + lag <= last; ++s) fn(s, s + lag);
    if (lag > cells / 2) break;
  }
  for (std::size_t t = first + 1; t <= last; ++t) fn(first, t);
  for (std::size_t s = first; s < last; ++s) fn(s, last);
}

struct PairWeights {
  std::vector<double> inv_gap_beta;  // (lag*dt)^-beta, index = lag
  std::vector<double> offset_beta;   // ((s-first)*dt)^beta, index = s-first
  std::vector<double> decay;         // e^{-rho*(t-first)*dt}, index = t-first

  PairWeights(std::size_t cells, double dt, double beta, double rho) {
    inv_gap_beta.resize(cells + 1, 0.0);
    offset_beta.resize(cells + 1, 0.0);
    decay.resize(cells + 1, 1.0);
    for (std::size_t l = 1; l <= cells; ++l) {
      inv_gap_beta[l] = std::pow(static_cast<double>(l) * dt, -beta);
      offset_beta[l] = std::pow(static_cast<double>(l) * dt, beta);
    }
    if (rho != 0.0) {
      for (std::size_t l = 0; l <= cells; ++l) {
        decay[l] = std::exp(-rho * static_cast<double>(l) * dt);
      }
    }
  }
};

// One scan computing all four norms; Diff(a,b) and Mag(a) abstract over
// scalar/vector payloads.
template <class Diff, class Mag>
NormReport scan_norms(const TimeGrid& grid, const Window& window, double beta, double rho,
                      Diff&& diff, Mag&& mag) {
  const IndexWindow iw = resolve_window(grid, window);
  const std::size_t cells = iw.cell_count();
  const PairWeights w(cells, grid.dt, beta, rho);

  NormReport report;
  report.beta = beta;
  report.rho = rho;

  double sup_plain = 0.0;
  double sup_weighted = 0.0;
  for (std::size_t k = iw.first; k <= iw.last; ++k) {
    const double v = mag(k);
    sup_plain = std::max(sup_plain, v);
    sup_weighted = std::max(sup_weighted, v * w.decay[k - iw.first]);
  }

  double semi_plain = 0.0;
  double semi_modified = 0.0;
  double semi_weighted = 0.0;
  for_each_pair(iw.first, iw.last, [&](std::size_t s, std::size_t t) {
    const double q = diff(s, t) * w.inv_gap_beta[t - s];
    semi_plain = std::max(semi_plain, q);
    const double m = q * w.offset_beta[s - iw.first];
    semi_modified = std::max(semi_modified, m);
    semi_weighted = std::max(semi_weighted, m * w.decay[t - iw.first]);
  });

  report.sup_norm = sup_plain;
  report.holder_seminorm = semi_plain;
  report.modified_norm = sup_plain + semi_modified;
  report.weighted_norm = sup_weighted + semi_weighted;
  return report;
}

NormReport scan_norms(const ScalarPath& p, double beta, double rho, const Window& window) {
  return scan_norms(
      p.grid, window, beta, rho,
      [&](std::size_t s, std::size_t t) { return std::abs(p.values[t] - p.values[s]); },
      [&](std::size_t k) { return std::abs(p.values[k]); });
}

NormReport scan_norms(const HilbertPath& p, double beta, double rho, const Window& window) {
  return scan_norms(
      p.grid, window, beta, rho,
      [&](std::size_t s, std::size_t t) { return node_distance(p, s, t); },
      [&](std::size_t k) { return node_magnitude(p, k); });
}

void validate_beta(double beta) {
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw std::invalid_argument("holder: exponent must lie in (0,1)");
  }
}

}  // namespace

void HolderParams::validate() const {
  if (!(0.5 < beta && beta < beta_prime && beta_prime < 1.0)) {
    throw std::invalid_argument("HolderParams: need 1/2 < beta < beta_prime < 1");
  }
  if (!(1.0 - beta_prime < alpha && alpha < beta)) {
    throw std::invalid_argument("HolderParams: need 1 - beta_prime < alpha < beta");
  }
  if (!(rho >= 0.0)) {
    throw std::invalid_argument("HolderParams: need rho >= 0");
  }
}

double sup_norm(const ScalarPath& path, const Window& window) {
  const IndexWindow iw = resolve_window(path.grid, window);
  double m = 0.0;
  for (std::size_t k = iw.first; k <= iw.last; ++k) m = std::max(m, std::abs(path.values[k]));
  return m;
}

double sup_norm(const HilbertPath& path, const Window& window) {
  const IndexWindow iw = resolve_window(path.grid, window);
  double m = 0.0;
  for (std::size_t k = iw.first; k <= iw.last; ++k) m = std::max(m, node_magnitude(path, k));
  return m;
}

double holder_seminorm(const ScalarPath& path, double beta, const Window& window) {
  validate_beta(beta);
  return scan_norms(path, beta, 0.0, window).holder_seminorm;
}

double holder_seminorm(const HilbertPath& path, double beta, const Window& window) {
  validate_beta(beta);
  return scan_norms(path, beta, 0.0, window).holder_seminorm;
}

double holder_norm(const ScalarPath& path, double beta, const Window& window) {
  validate_beta(beta);
  const NormReport r = scan_norms(path, beta, 0.0, window);
  return r.sup_norm + r.holder_seminorm;
}

double holder_norm(const HilbertPath& path, double beta, const Window& window) {
  validate_beta(beta);
  const NormReport r = scan_norms(path, beta, 0.0, window);
  return r.sup_norm + r.holder_seminorm;
}

double modified_norm(const ScalarPath& path, double beta, const Window& window) {
  validate_beta(beta);
  return scan_norms(path, beta, 0.0, window).modified_norm;
}

double modified_norm(const HilbertPath& path, double beta, const Window& window) {
  validate_beta(beta);
  return scan_norms(path, beta, 0.0, window).modified_norm;
}

double weighted_norm(const ScalarPath& path, double beta, double rho, const Window& window) {
  validate_beta(beta);
  if (!(rho >= 0.0)) throw std::invalid_argument("weighted_norm: need rho >= 0");
  return scan_norms(path, beta, rho, window).weighted_norm;
}

double weighted_norm(const HilbertPath& path, double beta, double rho, const Window& window) {
  validate_beta(beta);
  if (!(rho >= 0.0)) throw std::invalid_argument("weighted_norm: need rho >= 0");
  return scan_norms(path, beta, rho, window).weighted_norm;
}

NormReport make_norm_report(const ScalarPath& path, const HolderParams& params, const Window& window) {
  params.validate();
  return scan_norms(path, params.beta, params.rho, window);
}

NormReport make_norm_report(const HilbertPath& path, const HolderParams& params, const Window& window) {
  params.validate();
  return scan_norms(path, params.beta, params.rho, window);
}

double dyadic_exponent_estimate(const ScalarPath& path) {
  const std::size_t cells = path.grid.cells();
  if (cells < 8) throw std::invalid_argument("dyadic_exponent_estimate: path too short");
  std::vector<double> log_lag;
  std::vector<double> log_rms;
  for (std::size_t lag = 1; lag <= cells / 4; lag *= 2) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t s = 0; s + lag <= cells; ++s) {
      const double d = path.values[s + lag] - path.values[s];
      acc += d * d;
      ++count;
    }
    log_lag.push_back(std::log(static_cast<double>(lag) * path.grid.dt));
    log_rms.push_back(0.5 * std::log(acc / static_cast<double>(count)));
  }
  // Least-squares slope.
  const double n = static_cast<double>(log_lag.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < log_lag.size(); ++i) {
    sx += log_lag[i];
    sy += log_rms[i];
    sxx += log_lag[i] * log_lag[i];
    sxy += log_lag[i] * log_rms[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double holder_seminorm_dyadic(const ScalarPath& path, double beta, const Window& window) {
  validate_beta(beta);
  const IndexWindow iw = resolve_window(path.grid, window);
  const PairWeights w(iw.cell_count(), path.grid.dt, beta, 0.0);
  double semi = 0.0;
  for_each_dyadic_pair(iw.first, iw.last, [&](std::size_t s, std::size_t t) {
    const double q = std::abs(path.values[t] - path.values[s]) * w.inv_gap_beta[t - s];
    semi = std::max(semi, q);
  });
  return semi;
}

}  // namespace pathwise
