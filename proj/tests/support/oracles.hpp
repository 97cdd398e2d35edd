#pragma once

// Independent cross-checks used by the test suite: refined Riemann-Stieltjes
// sums, brute-force quadrature for the contraction kernel, slope fitting, and
// corpus builders.  Nothing here calls back into the routines under test.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pathwise/fbm.hpp"
#include "pathwise/path.hpp"

namespace oracles {

// Left-point Riemann-Stieltjes sum of the piecewise-linear reconstructions on
// a `refine`-fold subdivision of the window's cells.  For paths of Hoelder
// exponents beta + beta_prime > 1 this converges to the pathwise integral;
// the leftover truncation on rough pairs is about half the discrete quadratic
// covariation divided by `refine`.
inline double refined_left_sum(const pathwise::ScalarPath& z, const pathwise::ScalarPath& zeta,
                               const pathwise::Window& window, std::size_t refine) {
  const pathwise::IndexWindow iw = pathwise::resolve_window(z.grid, window);
  double acc = 0.0;
  for (std::size_t m = iw.first; m < iw.last; ++m) {
    const double z0 = z.values[m], z1 = z.values[m + 1];
    const double dz = (z1 - z0) / static_cast<double>(refine);
    const double dw = (zeta.values[m + 1] - zeta.values[m]) / static_cast<double>(refine);
    for (std::size_t j = 0; j < refine; ++j) {
      acc += (z0 + static_cast<double>(j) * dz) * dw;
    }
  }
  return acc;
}

// Composite Simpson rule with `panels` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      std::size_t panels) {
  if (panels % 2 != 0) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double acc = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) {
    acc += f(a + static_cast<double>(i) * h) * ((i % 2 != 0) ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

// I(rho) = Int_0^1 e^(-rho(1-v)) v^a (1-v)^b dv for a, b in (-1, 0], computed
// by absorbing each endpoint power into the measure (u = v^(a+1) near 0,
// u = (1-v)^(b+1) near 1) so plain Simpson applies to a C^2 integrand.
inline double kummer_integral(double rho, double a, double b, std::size_t panels = 4096) {
  const double ea = 1.0 / (a + 1.0);
  const double eb = 1.0 / (b + 1.0);
  const double ua = std::pow(0.5, a + 1.0);
  const double ub = std::pow(0.5, b + 1.0);
  const double lower = simpson(
      [&](double u) {
        const double v = std::pow(u, ea);
        return std::exp(-rho * (1.0 - v)) * std::pow(1.0 - v, b);
      },
      0.0, ua, panels);
  const double upper = simpson(
      [&](double u) {
        const double one_minus_v = std::pow(u, eb);
        return std::exp(-rho * one_minus_v) * std::pow(1.0 - one_minus_v, a);
      },
      0.0, ub, panels);
  return ea * lower + eb * upper;
}

// Brute-force  sup_{t in (0,T]} t^d I(rho t)  over a dense log+linear scan.
inline double kfun_brute(double rho, double a, double b, double d, double T,
                         std::size_t scan = 600) {
  double best = 0.0;
  for (std::size_t i = 1; i <= scan; ++i) {
    const double t_lin = T * static_cast<double>(i) / static_cast<double>(scan);
    const double t_log = T * std::pow(10.0, -6.0 * (1.0 - static_cast<double>(i) / scan));
    for (double t : {t_lin, t_log}) {
      best = std::max(best, std::pow(t, d) * kummer_integral(rho * t, a, b, 1024));
    }
  }
  return best;
}

// Least-squares slope of y against x.
inline double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fitted_slope: bad input");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Path sampled from a callable on a fresh grid over [t0, t1] with `cells` cells.
inline pathwise::ScalarPath path_from(const std::function<double(double)>& f, double t0, double t1,
                                      std::size_t cells) {
  pathwise::TimeGrid grid;
  grid.t0 = t0;
  grid.dt = (t1 - t0) / static_cast<double>(cells);
  grid.nodes = cells + 1;
  pathwise::ScalarPath p;
  p.grid = grid;
  p.values.resize(grid.nodes);
  for (std::size_t i = 0; i < grid.nodes; ++i) p.values[i] = f(grid.time(i));
  return p;
}

// Every k-th node of a path: the same underlying trajectory at a coarser
// resolution (honest refinement studies on one random draw).
inline pathwise::ScalarPath stride_subsample(const pathwise::ScalarPath& p, std::size_t k) {
  if ((p.grid.nodes - 1) % k != 0) throw std::invalid_argument("stride_subsample: stride");
  pathwise::ScalarPath out;
  out.grid.t0 = p.grid.t0;
  out.grid.dt = p.grid.dt * static_cast<double>(k);
  out.grid.nodes = (p.grid.nodes - 1) / k + 1;
  out.values.resize(out.grid.nodes);
  for (std::size_t i = 0; i < out.grid.nodes; ++i) out.values[i] = p.values[i * k];
  return out;
}

inline pathwise::HilbertPath stride_subsample(const pathwise::HilbertPath& p, std::size_t k) {
  if ((p.grid.nodes - 1) % k != 0) throw std::invalid_argument("stride_subsample: stride");
  pathwise::TimeGrid grid;
  grid.t0 = p.grid.t0;
  grid.dt = p.grid.dt * static_cast<double>(k);
  grid.nodes = (p.grid.nodes - 1) / k + 1;
  pathwise::HilbertPath out = pathwise::make_hilbert_path(grid, p.modes);
  for (std::size_t i = 0; i < grid.nodes; ++i) {
    for (std::size_t m = 0; m < p.modes; ++m) out.data[i * p.modes + m] = p.data[i * k * p.modes + m];
  }
  return out;
}

inline pathwise::ScalarPath fbm_path(double hurst, std::size_t steps, std::uint64_t seed,
                                     double t_start = 0.0, double t_end = 1.0) {
  pathwise::FbmConfig cfg;
  cfg.hurst = hurst;
  cfg.t_start = t_start;
  cfg.t_end = t_end;
  cfg.steps = steps;
  cfg.seed = seed;
  return pathwise::sample_fbm_1d(cfg);
}

}  // namespace oracles
