#include "pathwise/fraccalc.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pathwise/fbm.hpp"

namespace pathwise {

namespace {

// Read-only strided view of one component of a path over a window.
struct View {
  const double* p = nullptr;
  std::size_t stride = 1;
  double operator[](std::size_t i) const { return p[i * stride]; }
};

void check_order(double order) {
  if (!(order > 0.0) || !(order < 1.0)) {
    throw std::invalid_argument("weyl derivative: order must lie in (0,1)");
  }
}

}  // namespace

namespace detail {

WeylMoments left_weyl_moments(double order, double dt, std::size_t cells) {
  WeylMoments km;
  km.order = order;
  km.inv_gamma = 1.0 / std::tgamma(1.0 - order);
  km.adj = std::pow(dt, 1.0 - order) / (1.0 - order);
  km.P.assign(cells + 1, 0.0);
  km.A.assign(cells + 1, 0.0);
  km.B.assign(cells + 1, 0.0);
  for (std::size_t l = 1; l <= cells; ++l) {
    km.P[l] = std::pow(static_cast<double>(l) * dt, -order);
  }
  for (std::size_t l = 2; l <= cells; ++l) {
    const double x1 = static_cast<double>(l) * dt;
    const double x2 = static_cast<double>(l - 1) * dt;
    const double a = (std::pow(x2, -order) - std::pow(x1, -order)) / order;
    km.A[l] = a;
    km.B[l] = x1 * a - (std::pow(x1, 1.0 - order) - std::pow(x2, 1.0 - order)) / (1.0 - order);
  }
  return km;
}

WeylMoments right_weyl_moments(double order, double dt, std::size_t cells) {
  WeylMoments km;
  km.order = order;
  km.inv_gamma = 1.0 / std::tgamma(1.0 - order);
  km.adj = std::pow(dt, 1.0 - order) / (1.0 - order);
  km.P.assign(cells + 1, 0.0);
  km.A.assign(cells + 1, 0.0);
  km.B.assign(cells + 1, 0.0);
  for (std::size_t l = 1; l <= cells; ++l) {
    km.P[l] = std::pow(static_cast<double>(l) * dt, -order);
  }
  for (std::size_t l = 1; l + 1 <= cells; ++l) {
    const double y1 = static_cast<double>(l) * dt;
    const double y2 = static_cast<double>(l + 1) * dt;
    const double a = (std::pow(y1, -order) - std::pow(y2, -order)) / order;
    km.A[l] = a;
    km.B[l] = (std::pow(y2, 1.0 - order) - std::pow(y1, 1.0 - order)) / (1.0 - order) - y1 * a;
  }
  return km;
}

void weyl_left_kernel(const double* values, std::size_t stride, std::size_t cells, double dt,
                      const WeylMoments& km, double* out) {
  const auto v = [&](std::size_t i) { return values[i * stride]; };
  std::vector<double> slope(cells);
  for (std::size_t j = 0; j < cells; ++j) slope[j] = (v(j + 1) - v(j)) / dt;
  for (std::size_t m = 1; m <= cells; ++m) {
    const double zr = v(m);
    double acc = slope[m - 1] * km.adj;
    for (std::size_t j = 0; j + 1 < m; ++j) {
      const std::size_t lag = m - j;
      acc += (zr - v(j)) * km.A[lag] - slope[j] * km.B[lag];
    }
    out[m - 1] = km.inv_gamma * (zr * km.P[m] + km.order * acc);
  }
}

void weyl_right_kernel(const double* values, std::size_t stride, std::size_t cells, double dt,
                       const WeylMoments& km, double* out) {
  const auto v = [&](std::size_t i) { return values[i * stride]; };
  std::vector<double> slope(cells);
  for (std::size_t j = 0; j < cells; ++j) slope[j] = (v(j + 1) - v(j)) / dt;
  const double w_end = v(cells);
  for (std::size_t m = 0; m < cells; ++m) {
    const double wr = v(m);
    double acc = -slope[m] * km.adj;
    for (std::size_t j = m + 1; j < cells; ++j) {
      const std::size_t lag = j - m;
      acc += (wr - v(j)) * km.A[lag] - slope[j] * km.B[lag];
    }
    out[m] = km.inv_gamma * ((wr - w_end) * km.P[cells - m] + km.order * acc);
  }
}

}  // namespace detail

namespace {

using detail::WeylMoments;

// out[m-1], m = 1..cells: left derivative at window node m.
void weyl_left_core(const View& v, std::size_t cells, double dt, const WeylMoments& km, double* out) {
  detail::weyl_left_kernel(v.p, v.stride, cells, dt, km, out);
}

// out[m], m = 0..cells-1: right bracket at window node m.
void weyl_right_core(const View& v, std::size_t cells, double dt, const WeylMoments& km, double* out) {
  detail::weyl_right_kernel(v.p, v.stride, cells, dt, km, out);
}

bool all_equal(const View& v, std::size_t count) {
  for (std::size_t i = 1; i < count; ++i) {
    if (v[i] != v[0]) return false;
  }
  return true;
}

// Sub-cell resolution of the outer product quadrature.  Node-only sampling of
// the product of the two fractional derivatives loses the intra-cell
// covariation of the factors, which stalls convergence near cells^(-1/2) on
// rough paths; evaluating the derivatives of the piecewise-linear
// reconstructions exactly at a few interior points per cell restores it.
constexpr std::size_t kOuterRefine = 4;

// Exact samples of the two derivatives on the refined mesh of spacing
// dt/refine.  On-node entries are copied from the node kernels' output; the
// off-node ones repeat the per-cell moment integration at fractional lags
// (the evaluation point sits theta of the way into cell J).  Fills left[i-1]
// with the left derivative at refined node i and right[i] with the right
// bracket at refined node i, the layout outer_quadrature expects.
void refined_product_samples(const View& z, const View& w, std::size_t cells, double dt,
                             double alpha, const std::vector<double>& lnode,
                             const std::vector<double>& rnode, std::size_t refine,
                             std::vector<double>& left, std::vector<double>& right) {
  const std::size_t n = cells * refine;
  left.assign(n, 0.0);
  right.assign(n, 0.0);
  for (std::size_t m = 1; m <= cells; ++m) left[m * refine - 1] = lnode[m - 1];
  for (std::size_t m = 0; m < cells; ++m) right[m * refine] = rnode[m];
  if (refine == 1) return;

  const double nu_l = alpha;
  const double nu_r = 1.0 - alpha;
  const double igl = 1.0 / std::tgamma(1.0 - nu_l);
  const double igr = 1.0 / std::tgamma(1.0 - nu_r);
  std::vector<double> slope_z(cells), slope_w(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    slope_z[j] = (z[j + 1] - z[j]) / dt;
    slope_w[j] = (w[j + 1] - w[j]) / dt;
  }
  std::vector<double> AL(cells + 1), BL(cells + 1), AR(cells + 1), BR(cells + 1);
  for (std::size_t s = 1; s < refine; ++s) {
    const double theta = static_cast<double>(s) / static_cast<double>(refine);
    for (std::size_t l = 1; l <= cells; ++l) {
      const double x1 = (static_cast<double>(l) + theta) * dt;
      const double x2 = (static_cast<double>(l) - 1.0 + theta) * dt;
      AL[l] = (std::pow(x2, -nu_l) - std::pow(x1, -nu_l)) / nu_l;
      BL[l] = x1 * AL[l] - (std::pow(x1, 1.0 - nu_l) - std::pow(x2, 1.0 - nu_l)) / (1.0 - nu_l);
      const double y1 = (static_cast<double>(l) - theta) * dt;
      const double y2 = (static_cast<double>(l) + 1.0 - theta) * dt;
      AR[l] = (std::pow(y1, -nu_r) - std::pow(y2, -nu_r)) / nu_r;
      BR[l] = (std::pow(y2, 1.0 - nu_r) - std::pow(y1, 1.0 - nu_r)) / (1.0 - nu_r) - y1 * AR[l];
    }
    const double adjl = std::pow(theta * dt, 1.0 - nu_l) / (1.0 - nu_l);
    const double adjr = std::pow((1.0 - theta) * dt, 1.0 - nu_r) / (1.0 - nu_r);
    for (std::size_t J = 0; J < cells; ++J) {
      const double zr = z[J] + slope_z[J] * (theta * dt);
      double acc = slope_z[J] * adjl;
      for (std::size_t l = 1; l <= J; ++l) {
        acc += (zr - z[J - l]) * AL[l] - slope_z[J - l] * BL[l];
      }
      const double pl = std::pow((static_cast<double>(J) + theta) * dt, -nu_l);
      left[J * refine + s - 1] = igl * (zr * pl + nu_l * acc);

      const double wr = w[J] + slope_w[J] * (theta * dt);
      double accr = -slope_w[J] * adjr;
      for (std::size_t l = 1; l + J < cells; ++l) {
        accr += (wr - w[J + l]) * AR[l] - slope_w[J + l] * BR[l];
      }
      const double pr = std::pow((static_cast<double>(cells - J) - theta) * dt, -nu_r);
      right[J * refine + s] = igr * ((wr - w[cells]) * pr + nu_r * accr);
    }
  }
}

// Outer quadrature on the refined mesh.  Inside coarse cell J the left
// derivative carries an exact cusp c_L * theta^(1-alpha) from the moment of
// the cell containing the evaluation point (theta in [0,1] the position
// within the cell), and the right bracket carries -c_R * (1-theta)^alpha,
// both with closed-form coefficients proportional to the local path slope.
// Interior cells subtract the cusps, integrate the smooth remainders by the
// exact affine-product rule per subcell, and add back the cusp-cross moments
// (piecewise-linear remainder against the cusp powers, Beta function for
// cusp times cusp).  The window-end cells keep the singular envelopes
// (f ~ r^(-alpha) on the first, f ~ (T2-r)^(alpha+beta'-1) on the last).
double refined_outer_quadrature(const View& z, const View& w, std::size_t cells, double dt,
                                double alpha, double beta_prime,
                                const std::vector<double>& lnode, const std::vector<double>& rnode,
                                const std::vector<double>& left, const std::vector<double>& right,
                                std::size_t refine) {
  const std::size_t n = cells * refine;
  const double h = dt / static_cast<double>(refine);

  // affine-product integral of one subcell: trapezoid minus the cross term
  const auto cell_product = [](double l0, double l1, double r0, double r1) {
    return 0.5 * (l0 * r0 + l1 * r1) - (l1 - l0) * (r1 - r0) / 6.0;
  };

  double total = left[0] * right[1] * h / (1.0 - alpha);  // leading envelope subcell
  for (std::size_t i = 1; i < refine; ++i) {              // rest of the first coarse cell
    total += h * cell_product(left[i - 1], left[i], right[i], right[i + 1]);
  }

  if (cells > 2) {
    // theta-moments of the cusp powers against a hat basis per subcell:
    // P0/Q0 integrate the power, P1/Q1 its first moment from the subcell foot.
    const double e1 = 1.0 - alpha, e2 = 2.0 - alpha, e3 = 3.0 - alpha;
    std::vector<double> P0(refine), P1(refine), Q0(refine), Q1(refine);
    for (std::size_t s = 0; s < refine; ++s) {
      const double t0 = static_cast<double>(s) / static_cast<double>(refine);
      const double t1 = static_cast<double>(s + 1) / static_cast<double>(refine);
      P0[s] = (std::pow(t1, e2) - std::pow(t0, e2)) / e2;
      P1[s] = (std::pow(t1, e3) - std::pow(t0, e3)) / e3 - t0 * P0[s];
      const double u0 = 1.0 - t0, u1 = 1.0 - t1;
      Q0[s] = (std::pow(u0, 1.0 + alpha) - std::pow(u1, 1.0 + alpha)) / (1.0 + alpha);
      Q1[s] = u0 * Q0[s] - (std::pow(u0, 2.0 + alpha) - std::pow(u1, 2.0 + alpha)) / (2.0 + alpha);
    }
    const double beta_pq =
        std::tgamma(2.0 - alpha) * std::tgamma(1.0 + alpha) / 2.0;  // B(2-alpha, 1+alpha)
    // Cusp coefficients are the *slope jumps* across the cell edges (the
    // partial-cell moment and the adjacent whole-cell moment cancel the
    // common-slope part exactly, so smooth reconstructions carry no cusp).
    const double cl_scale = std::pow(dt, 1.0 - alpha) / ((1.0 - alpha) * std::tgamma(1.0 - alpha));
    const double cr_scale = std::pow(dt, alpha) / (alpha * std::tgamma(alpha));
    const double rinv = 1.0 / static_cast<double>(refine);

    std::vector<double> al(refine + 1), ar(refine + 1);
    for (std::size_t J = 1; J + 1 < cells; ++J) {
      const double cl = ((z[J + 1] - 2.0 * z[J] + z[J - 1]) / dt) * cl_scale;
      const double dr = ((w[J + 2] - 2.0 * w[J + 1] + w[J]) / dt) * cr_scale;
      al[0] = lnode[J - 1];
      ar[0] = rnode[J] - dr;
      for (std::size_t s = 1; s < refine; ++s) {
        const double t0 = static_cast<double>(s) / static_cast<double>(refine);
        al[s] = left[J * refine + s - 1] - cl * std::pow(t0, e1);
        ar[s] = right[J * refine + s] - dr * std::pow(1.0 - t0, alpha);
      }
      al[refine] = lnode[J] - cl;
      ar[refine] = rnode[J + 1];

      double smooth = 0.0, pmom = 0.0, qmom = 0.0;
      for (std::size_t s = 0; s < refine; ++s) {
        smooth += rinv * cell_product(al[s], al[s + 1], ar[s], ar[s + 1]);
        pmom += ar[s] * P0[s] + (ar[s + 1] - ar[s]) * P1[s] * static_cast<double>(refine);
        qmom += al[s] * Q0[s] + (al[s + 1] - al[s]) * Q1[s] * static_cast<double>(refine);
      }
      total += dt * (smooth + cl * pmom + dr * qmom + cl * dr * beta_pq);
    }
  }

  const std::size_t base = (cells - 1) * refine;  // last coarse cell
  for (std::size_t i = base; i + 1 < n; ++i) {
    total += h * cell_product(left[i - 1], left[i], right[i], right[i + 1]);
  }
  total += left[n - 2] * right[n - 1] * h / (alpha + beta_prime);  // trailing envelope subcell
  return -total;
}

// Scalar integral over a resolved window given component views of z and zeta.
double zahle_component(const View& z, const View& zeta, std::size_t cells, double dt,
                       const HolderParams& params, const WeylMoments* lm, const WeylMoments* rm) {
  if (cells == 1 || all_equal(z, cells + 1)) {
    return z[0] * (zeta[cells] - zeta[0]);
  }
  // Split off the constant part of the integrand: the quadrature only sees
  // z - z(T1), whose left derivative has no (r-T1)^(-alpha) boundary layer, so
  // the frozen-envelope first cell is exact instead of O(dt^(2-2 alpha)).
  const double anchor = z[0];
  std::vector<double> shifted(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) shifted[i] = z[i] - anchor;
  const View zs{shifted.data(), 1};
  const double constant_part = anchor * (zeta[cells] - zeta[0]);
  std::vector<double> lnode(cells), rnode(cells);
  weyl_left_core(zs, cells, dt, *lm, lnode.data());
  weyl_right_core(zeta, cells, dt, *rm, rnode.data());
  std::vector<double> left, right;
  refined_product_samples(zs, zeta, cells, dt, params.alpha, lnode, rnode, kOuterRefine, left,
                          right);
  return constant_part + refined_outer_quadrature(zs, zeta, cells, dt, params.alpha,
                                                  params.beta_prime, lnode, rnode, left, right,
                                                  kOuterRefine);
}

void check_same_grid(const TimeGrid& a, const TimeGrid& b, const char* who) {
  if (!same_grid(a, b)) {
    throw std::invalid_argument(std::string(who) + ": integrand and integrator grids differ");
  }
}

}  // namespace

OperatorPath OperatorPath::make_diagonal(const TimeGrid& grid, std::size_t modes) {
  OperatorPath z;
  z.grid = grid;
  z.rows = modes;
  z.cols = modes;
  z.diagonal = true;
  z.data.assign(grid.nodes * modes, 0.0);
  return z;
}

OperatorPath OperatorPath::make_dense(const TimeGrid& grid, std::size_t rows, std::size_t cols) {
  OperatorPath z;
  z.grid = grid;
  z.rows = rows;
  z.cols = cols;
  z.diagonal = false;
  z.data.assign(grid.nodes * rows * cols, 0.0);
  return z;
}

OperatorPath OperatorPath::time_shift(double tau) const {
  const std::size_t k = grid.index_of(tau);
  OperatorPath out = *this;
  out.grid = pathwise::detail::shift_grid(grid, k);
  return out;
}

FracDerivSamples weyl_left_derivative(const ScalarPath& z, double order, const Window& window) {
  check_order(order);
  const IndexWindow iw = resolve_window(z.grid, window);
  const std::size_t cells = iw.cell_count();
  const detail::WeylMoments km = detail::left_weyl_moments(order, z.grid.dt, cells);
  FracDerivSamples out;
  out.t_first = z.grid.time(iw.first + 1);
  out.dt = z.grid.dt;
  out.values.resize(cells);
  const View v{z.values.data() + iw.first, 1};
  weyl_left_core(v, cells, z.grid.dt, km, out.values.data());
  return out;
}

FracDerivSamples weyl_right_derivative(const ScalarPath& omega, double order, const Window& window) {
  check_order(order);
  const IndexWindow iw = resolve_window(omega.grid, window);
  const std::size_t cells = iw.cell_count();
  const detail::WeylMoments km = detail::right_weyl_moments(order, omega.grid.dt, cells);
  FracDerivSamples out;
  out.t_first = omega.grid.time(iw.first);
  out.dt = omega.grid.dt;
  out.values.resize(cells);
  const View v{omega.values.data() + iw.first, 1};
  weyl_right_core(v, cells, omega.grid.dt, km, out.values.data());
  return out;
}

namespace detail {

double outer_quadrature(const std::vector<double>& left, const std::vector<double>& right,
                        std::size_t cells, double dt, double alpha, double beta_prime) {
  if (cells < 2) throw std::invalid_argument("outer_quadrature: need at least two cells");
  if (left.size() < cells || right.size() < cells) {
    throw std::invalid_argument("outer_quadrature: sample arrays too short");
  }
  const std::size_t m = cells;
  // f at interior node j (j = 1..m-1): left[j-1] * right[j].
  // phi removes the (r-T1)^(-alpha) weight: phi_j = f_j * (j*dt)^alpha.
  std::vector<double> pw1(m + 1), pw2(m + 1);  // j^(1-alpha), j^(2-alpha)
  for (std::size_t j = 0; j <= m; ++j) {
    pw1[j] = std::pow(static_cast<double>(j), 1.0 - alpha);
    pw2[j] = std::pow(static_cast<double>(j), 2.0 - alpha);
  }
  const double c0 = std::pow(dt, 1.0 - alpha) / (1.0 - alpha);
  const double c1 = std::pow(dt, 2.0 - alpha) / (2.0 - alpha);

  const double f1 = left[0] * right[1];
  const double f_last = left[m - 2] * right[m - 1];

  double total = f1 * dt / (1.0 - alpha);  // first cell: frozen (r-T1)^(-alpha) envelope
  double phi_j = f1 * std::pow(dt, alpha);
  for (std::size_t j = 1; j + 1 <= m - 1; ++j) {
    const double f_next = left[j] * right[j + 1];
    const double phi_next = f_next * std::pow(static_cast<double>(j + 1) * dt, alpha);
    const double m0 = c0 * (pw1[j + 1] - pw1[j]);
    const double m1 = c1 * (pw2[j + 1] - pw2[j]) - static_cast<double>(j) * dt * m0;
    total += phi_j * m0 + (phi_next - phi_j) * (m1 / dt);
    phi_j = phi_next;
  }
  total += f_last * dt / (alpha + beta_prime);  // last cell: (T2-r)^(alpha+beta_prime-1) envelope
  return -total;
}

double zahle_integral_quadrature(const ScalarPath& z, const ScalarPath& zeta,
                                 const HolderParams& params, const Window& window) {
  params.validate();
  check_same_grid(z.grid, zeta.grid, "zahle_integral");
  const IndexWindow iw = resolve_window(z.grid, window);
  const std::size_t cells = iw.cell_count();
  if (cells == 1) return z.values[iw.first] * (zeta.values[iw.last] - zeta.values[iw.first]);
  const WeylMoments lm = left_weyl_moments(params.alpha, z.grid.dt, cells);
  const WeylMoments rm = right_weyl_moments(1.0 - params.alpha, z.grid.dt, cells);
  std::vector<double> left(cells), right(cells);
  weyl_left_core(View{z.values.data() + iw.first, 1}, cells, z.grid.dt, lm, left.data());
  weyl_right_core(View{zeta.values.data() + iw.first, 1}, cells, z.grid.dt, rm, right.data());
  return outer_quadrature(left, right, cells, z.grid.dt, params.alpha, params.beta_prime);
}

}  // namespace detail

double zahle_integral(const ScalarPath& z, const ScalarPath& zeta,
                      const HolderParams& params, const Window& window) {
  params.validate();
  check_same_grid(z.grid, zeta.grid, "zahle_integral");
  const IndexWindow iw = resolve_window(z.grid, window);
  const std::size_t cells = iw.cell_count();
  const View zv{z.values.data() + iw.first, 1};
  const View wv{zeta.values.data() + iw.first, 1};
  if (cells == 1 || all_equal(zv, cells + 1)) {
    return zv[0] * (wv[cells] - wv[0]);
  }
  const detail::WeylMoments lm = detail::left_weyl_moments(params.alpha, z.grid.dt, cells);
  const detail::WeylMoments rm = detail::right_weyl_moments(1.0 - params.alpha, z.grid.dt, cells);
  return zahle_component(zv, wv, cells, z.grid.dt, params, &lm, &rm);
}

std::vector<double> zahle_integral(const OperatorPath& Z, const HilbertPath& omega,
                                   const HolderParams& params, const Window& window) {
  params.validate();
  check_same_grid(Z.grid, omega.grid, "zahle_integral");
  if (Z.cols != omega.modes) {
    throw std::invalid_argument("zahle_integral: operator columns != driver modes");
  }
  const IndexWindow iw = resolve_window(Z.grid, window);
  const std::size_t cells = iw.cell_count();
  const double dt = Z.grid.dt;

  // Moment tables shared across all components.
  detail::WeylMoments lm;
  detail::WeylMoments rm;
  if (cells > 1) {
    lm = detail::left_weyl_moments(params.alpha, dt, cells);
    rm = detail::right_weyl_moments(1.0 - params.alpha, dt, cells);
  }

  std::vector<double> out(Z.rows, 0.0);
  if (Z.diagonal) {
    for (std::size_t i = 0; i < Z.rows; ++i) {
      const View zv{Z.data.data() + iw.first * Z.cols + i, Z.cols};
      const View wv{omega.data.data() + iw.first * omega.modes + i, omega.modes};
      out[i] = zahle_component(zv, wv, cells, dt, params, &lm, &rm);
    }
  } else {
    const std::size_t node_stride = Z.rows * Z.cols;
    for (std::size_t j = 0; j < Z.rows; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < Z.cols; ++i) {
        const View zv{Z.data.data() + iw.first * node_stride + j * Z.cols + i, node_stride};
        const View wv{omega.data.data() + iw.first * omega.modes + i, omega.modes};
        acc += zahle_component(zv, wv, cells, dt, params, &lm, &rm);
      }
      out[j] = acc;
    }
  }
  return out;
}

double riemann_stieltjes(const ScalarPath& z, const ScalarPath& zeta, const Window& window) {
  check_same_grid(z.grid, zeta.grid, "riemann_stieltjes");
  const IndexWindow iw = resolve_window(z.grid, window);
  double acc = 0.0;
  for (std::size_t k = iw.first; k < iw.last; ++k) {
    acc += z.values[k] * (zeta.values[k + 1] - zeta.values[k]);
  }
  return acc;
}

double additivity_defect(const ScalarPath& z, const ScalarPath& zeta,
                         const HolderParams& params, double t1, double t2, double t3) {
  const double i12 = zahle_integral(z, zeta, params, {t1, t2});
  const double i23 = zahle_integral(z, zeta, params, {t2, t3});
  const double i13 = zahle_integral(z, zeta, params, {t1, t3});
  return std::abs(i12 + i23 - i13);
}

double shift_covariance_defect(const OperatorPath& Z, const HilbertPath& omega, double tau,
                               const HolderParams& params, const Window& window) {
  const std::vector<double> base = zahle_integral(Z, omega, params, window);

  const IndexWindow iw = resolve_window(Z.grid, window);
  const OperatorPath zs = Z.time_shift(tau);
  const HilbertPath ws = wiener_shift(omega, tau);
  const Window shifted{zs.grid.time(iw.first), zs.grid.time(iw.last)};
  const std::vector<double> moved = zahle_integral(zs, ws, params, shifted);

  double acc = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double d = base[i] - moved[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace pathwise
