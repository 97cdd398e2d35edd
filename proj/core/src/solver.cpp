#include "pathwise/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "pathwise/errors.hpp"
#include "pathwise/fbm.hpp"
#include "pathwise/rng.hpp"

namespace pathwise {

namespace {

// e^-45 ~ 3e-20: beyond this decay the semigroup history is dropped and the
// truncated window start takes over the boundary weight.
constexpr double kDecayWindowExponent = 45.0;
constexpr std::size_t kCalibrationPairs = 8;
constexpr std::uint64_t kCalibrationSeed = 0x0c0de5eedULL;

double l2_norm(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double l2_norm(const std::vector<double>& v) {
  double acc = 0.0;
  for (const double x : v) acc += x * x;
  return std::sqrt(acc);
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + m, v.end());
  const double hi = v[m];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + m);
  return 0.5 * (lo + hi);
}

// Repeated applications of the fixed-point map on one problem share these
// tables.  Cost is O(steps^2) per mode per application: the left factor
// e^(-lambda(t_k - .)) G(u) separates as e^(-lambda dt (k-m)) times a
// k-independent derivative at m (computed over a window where the decay
// factor stays above e^-45), and the integrator brackets grow incrementally
// in k.
class MapEngine {
 public:
  MapEngine(const MildProblem& problem, bool full_window)
      : p_(&problem),
        grid_(problem.solution_grid()),
        n_(problem.steps),
        modes_(problem.op.modes()),
        k0_(problem.omega.grid.index_of(0.0)),
        dt_(grid_.dt),
        alpha_(problem.params.alpha),
        nu_(1.0 - problem.params.alpha),
        beta_prime_(problem.params.beta_prime),
        lm_(detail::left_weyl_moments(alpha_, dt_, n_)),
        rm_(detail::right_weyl_moments(nu_, dt_, n_)) {
    pw1_.resize(n_ + 1);
    pw2_.resize(n_ + 1);
    powa_.resize(n_ + 1);
    for (std::size_t j = 0; j <= n_; ++j) {
      pw1_[j] = std::pow(static_cast<double>(j), 1.0 - alpha_);
      pw2_[j] = std::pow(static_cast<double>(j), 2.0 - alpha_);
      powa_[j] = std::pow(static_cast<double>(j) * dt_, alpha_);
    }
    c0_ = std::pow(dt_, 1.0 - alpha_) / (1.0 - alpha_);
    c1_ = std::pow(dt_, 2.0 - alpha_) / (2.0 - alpha_);

    wcols_.resize(modes_ * (n_ + 1));
    mode_.resize(modes_);
    for (std::size_t i = 0; i < modes_; ++i) {
      Mode& md = mode_[i];
      md.lambda = problem.op.lambdas[i];
      md.mu = problem.G.mus[i];
      std::size_t W = n_;
      if (!full_window && md.lambda > 0.0) {
        const double cap = std::ceil(kDecayWindowExponent / (md.lambda * dt_));
        if (cap < static_cast<double>(n_)) {
          W = std::max<std::size_t>(2, static_cast<std::size_t>(cap));
        }
      }
      md.W = W;
      md.edecay.resize(W + 1);
      for (std::size_t l = 0; l <= W; ++l) {
        md.edecay[l] = std::exp(-md.lambda * (dt_ * static_cast<double>(l)));
      }
      md.su.resize(n_ + 1);
      for (std::size_t k = 0; k <= n_; ++k) {
        md.su[k] = std::exp(-md.lambda * (dt_ * static_cast<double>(k)));
      }
      double* w = &wcols_[i * (n_ + 1)];
      for (std::size_t k = 0; k <= n_; ++k) {
        w[k] = problem.omega.data[(k0_ + k) * modes_ + i];
      }
      md.sw.resize(n_);
      for (std::size_t m = 0; m < n_; ++m) md.sw[m] = (w[m + 1] - w[m]) / dt_;
    }
    g_.resize(n_ + 1);
    Lo_.resize(n_ + 1);
    inner_.resize(n_ + 1);
    fb_.resize(n_ + 1);
    I_.resize(n_ + 1);
  }

  const TimeGrid& grid() const { return grid_; }

  void initial_iterate(const std::vector<double>& u0, bool constant, HilbertPath& out) const {
    for (std::size_t i = 0; i < modes_; ++i) {
      for (std::size_t k = 0; k <= n_; ++k) {
        out.data[k * modes_ + i] = constant ? u0[i] : mode_[i].su[k] * u0[i];
      }
    }
  }

  // out = S(.)u0 + integral term; out must live on the solution grid.
  void apply(const HilbertPath& u, const std::vector<double>& u0, HilbertPath& out) {
    for (std::size_t i = 0; i < modes_; ++i) {
      const Mode& md = mode_[i];
      for (std::size_t m = 0; m <= n_; ++m) {
        g_[m] = md.mu * p_->G.h(u.data[m * modes_ + i]);
      }
      mode_integrals(i);
      const double u0i = u0[i];
      for (std::size_t k = 0; k <= n_; ++k) {
        out.data[k * modes_ + i] = md.su[k] * u0i + I_[k];
      }
    }
  }

 private:
  struct Mode {
    double lambda = 0.0;
    double mu = 0.0;
    std::size_t W = 0;            // decay window, in cells
    std::vector<double> edecay;   // e^(-lambda dt l), l = 0..W
    std::vector<double> su;       // e^(-lambda t_k), k = 0..n
    std::vector<double> sw;       // driver slopes, m = 0..n-1
  };

  // I_[k] = Int_0^{t_k} e^(-lambda(t_k - r)) g(r) domega(r), k = 0..n, for the
  // integrand samples currently in g_.
  void mode_integrals(std::size_t i) {
    const Mode& md = mode_[i];
    const double* w = &wcols_[i * (n_ + 1)];
    const double* g = g_.data();
    const double* ed = md.edecay.data();
    I_[0] = 0.0;

    bool gconst = true;
    for (std::size_t m = 1; m <= n_ && gconst; ++m) gconst = (g[m] == g[0]);
    if (gconst && (md.lambda == 0.0 || g[0] == 0.0)) {
      // no semigroup in play: the integral of a constant is exact
      for (std::size_t k = 0; k <= n_; ++k) I_[k] = g[0] * (w[k] - w[0]);
      return;
    }

    const std::size_t W = md.W;
    // k-independent left factor: derivative at node m of e^(-lambda(t_m - .))g
    // over [t_m - W dt, t_m]; dropped history is absorbed into the boundary
    // weight P[m - hlo] (error O(e^-45)).
    for (std::size_t m = 1; m <= n_; ++m) {
      const std::size_t hlo = m > W ? m - W : 0;
      double acc = ((g[m] - ed[1] * g[m - 1]) / dt_) * lm_.adj;
      for (std::size_t j = hlo; j + 1 < m; ++j) {
        const double zj = ed[m - j] * g[j];
        const double zj1 = ed[m - j - 1] * g[j + 1];
        acc += (g[m] - zj) * lm_.A[m - j] - ((zj1 - zj) / dt_) * lm_.B[m - j];
      }
      Lo_[m] = lm_.inv_gamma * (g[m] * lm_.P[m - hlo] + alpha_ * acc);
    }

    std::fill(inner_.begin(), inner_.end(), 0.0);
    I_[1] = ed[1] * g[0] * (w[1] - w[0]);
    for (std::size_t k = 2; k <= n_; ++k) {
      // integrator brackets pick up the one new node k-1
      const double wk1 = w[k - 1];
      const double swk1 = md.sw[k - 1];
      for (std::size_t m = 1; m + 1 < k; ++m) {
        const std::size_t lag = k - 1 - m;
        inner_[m] += (w[m] - wk1) * rm_.A[lag] - swk1 * rm_.B[lag];
      }
      const std::size_t jlo = k > W ? k - W : 1;
      for (std::size_t m = 1; m < k; ++m) {
        if (m < jlo) {
          fb_[m] = 0.0;
          continue;
        }
        const double right = rm_.inv_gamma * ((w[m] - w[k]) * rm_.P[k - m] +
                                              nu_ * (inner_[m] - md.sw[m] * rm_.adj));
        fb_[m] = (ed[k - m] * Lo_[m]) * right;
      }
      const double f1 = fb_[1];
      double total = f1 * dt_ / (1.0 - alpha_);
      double phi = f1 * powa_[1];
      for (std::size_t j = 1; j + 1 <= k - 1; ++j) {
        const double fn = fb_[j + 1];
        const double phin = fn * powa_[j + 1];
        const double m0 = c0_ * (pw1_[j + 1] - pw1_[j]);
        const double m1 = c1_ * (pw2_[j + 1] - pw2_[j]) - static_cast<double>(j) * dt_ * m0;
        total += phi * m0 + (phin - phi) * (m1 / dt_);
        phi = phin;
      }
      total += fb_[k - 1] * dt_ / (alpha_ + beta_prime_);
      I_[k] = -total;
    }
  }

  const MildProblem* p_;
  TimeGrid grid_;
  std::size_t n_;
  std::size_t modes_;
  std::size_t k0_;
  double dt_;
  double alpha_;
  double nu_;
  double beta_prime_;
  detail::WeylMoments lm_;
  detail::WeylMoments rm_;
  std::vector<double> pw1_, pw2_, powa_;
  double c0_ = 0.0, c1_ = 0.0;
  std::vector<Mode> mode_;
  std::vector<double> wcols_;
  std::vector<double> g_, Lo_, inner_, fb_, I_;
};

void subtract_into(const HilbertPath& a, const HilbertPath& b, HilbertPath& out) {
  for (std::size_t j = 0; j < out.data.size(); ++j) out.data[j] = a.data[j] - b.data[j];
}

}  // namespace

void MildProblem::validate() const {
  op.validate();
  params.validate();
  if (G.modes() != op.modes()) {
    throw std::invalid_argument("MildProblem: coefficient and operator mode counts differ");
  }
  if (omega.modes != op.modes()) {
    throw std::invalid_argument("MildProblem: driver and operator mode counts differ");
  }
  if (u0.size() != op.modes()) {
    throw std::invalid_argument("MildProblem: initial value has the wrong dimension");
  }
  if (!(horizon > 0.0)) throw std::invalid_argument("MildProblem: horizon must be positive");
  if (steps < 2) throw std::invalid_argument("MildProblem: need at least two cells");
  const std::size_t a = omega.grid.index_of(0.0);
  const std::size_t b = omega.grid.index_of(horizon);
  if (b - a != steps) {
    throw std::invalid_argument("MildProblem: steps must equal the driver cells across [0, horizon]");
  }
}

TimeGrid MildProblem::solution_grid() const { return TimeGrid{0.0, omega.grid.dt, steps + 1}; }

IndexWindow MildProblem::driver_window() const {
  const std::size_t a = omega.grid.index_of(0.0);
  return IndexWindow{a, a + steps};
}

double MildProblem::driver_seminorm() const {
  return holder_seminorm(omega, params.beta_prime, Window{0.0, horizon});
}

HilbertPath fixed_point_map(const MildProblem& problem, const HilbertPath& u,
                            const SolveOptions& options, const std::vector<double>& u0_override) {
  problem.validate();
  MapEngine engine(problem, options.force_direct_route);
  if (!same_grid(u.grid, engine.grid()) || u.modes != problem.op.modes()) {
    throw std::invalid_argument("fixed_point_map: iterate must live on the solution grid");
  }
  const std::vector<double>& u0 = u0_override.empty() ? problem.u0 : u0_override;
  if (u0.size() != problem.op.modes()) {
    throw std::invalid_argument("fixed_point_map: initial value has the wrong dimension");
  }
  HilbertPath out = make_hilbert_path(engine.grid(), problem.op.modes());
  engine.apply(u, u0, out);
  return out;
}

double kfun(double rho, double a, double b, double d, double T) {
  if (!(a > -1.0) || !(b > -1.0)) throw std::invalid_argument("kfun: need a > -1 and b > -1");
  if (!(a + b >= -1.0)) throw std::invalid_argument("kfun: need a + b >= -1");
  if (!(d > 0.0)) throw std::invalid_argument("kfun: need d > 0");
  if (!(T > 0.0)) throw std::invalid_argument("kfun: need T > 0");
  if (!(rho >= 0.0)) throw std::invalid_argument("kfun: need rho >= 0");
  if (rho == 0.0) {
    // the inner integral no longer depends on t; the sup sits at t = T
    return std::pow(T, d) * boost::math::beta(a + 1.0, b + 1.0);
  }

  // Substitute w = 1 - v: inner(x) = Int_0^1 e^(-x w) w^b (1-w)^a dw at
  // x = rho t.  Exact incomplete-Beta cell moments against piecewise-linear
  // e^(-x w) on a geometric mesh keep the endpoint singularities exact.
  const double wmin = std::min(1e-6, 0.01 / std::max(1.0, rho * T));
  std::vector<double> knots;
  knots.push_back(0.0);
  const double step = std::pow(10.0, 1.0 / 256.0);
  for (double wk = wmin; wk < 1.0; wk *= step) knots.push_back(wk);
  knots.push_back(1.0);
  const std::size_t cells = knots.size() - 1;
  std::vector<double> m0(cells), m1(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const double w1 = knots[c];
    const double w2 = knots[c + 1];
    double i0, i1;
    if (w2 <= 0.5) {
      i0 = boost::math::beta(b + 1.0, a + 1.0, w2) - boost::math::beta(b + 1.0, a + 1.0, w1);
      i1 = boost::math::beta(b + 2.0, a + 1.0, w2) - boost::math::beta(b + 2.0, a + 1.0, w1);
    } else {
      i0 = boost::math::betac(b + 1.0, a + 1.0, w1) - boost::math::betac(b + 1.0, a + 1.0, w2);
      i1 = boost::math::betac(b + 2.0, a + 1.0, w1) - boost::math::betac(b + 2.0, a + 1.0, w2);
    }
    m0[c] = i0;
    m1[c] = i1 - w1 * i0;
  }
  const auto inner = [&](double x) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      const double e1 = std::exp(-x * knots[c]);
      const double e2 = std::exp(-x * knots[c + 1]);
      acc += e1 * m0[c] + (e2 - e1) * (m1[c] / (knots[c + 1] - knots[c]));
    }
    return acc;
  };
  const auto value = [&](double t) { return std::pow(t, d) * inner(rho * t); };

  const std::vector<double> ts = log_spaced(T * 1e-8, T, 64);
  double best = 0.0;
  std::size_t bi = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double v = value(ts[i]);
    if (v > best) {
      best = v;
      bi = i;
    }
  }
  double lo = bi == 0 ? ts[0] * 0.5 : ts[bi - 1];
  double hi = bi + 1 < ts.size() ? ts[bi + 1] : T;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo);
  double x2 = lo + gr * (hi - lo);
  double f1 = value(x1);
  double f2 = value(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = value(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = value(x1);
    }
  }
  return std::max(best, std::max(f1, f2));
}

double contraction_modulus(const HolderParams& params, double rho, double T) {
  params.validate();
  return kfun(rho, -params.alpha, params.alpha - 1.0, params.beta_prime - params.beta, T);
}

RhoChoice choose_rho(const MildProblem& problem, double c_T) {
  if (!(c_T > 0.0)) throw std::invalid_argument("choose_rho: c_T must be positive");
  const double X = problem.driver_seminorm();
  double rho = 1.0;
  RhoChoice rc;
  for (int iter = 0; iter <= 64; ++iter) {
    rc.rho = rho;
    rc.K = contraction_modulus(problem.params, rho, problem.horizon);
    rc.product = c_T * X * rc.K;
    if (rc.product < 0.5) return rc;
    rho *= 2.0;
  }
  throw numeric_error("choose_rho: contraction product stays >= 1/2 for every weight up to 2^64");
}

HilbertPath random_holder_path(const MildProblem& problem, double scale, std::uint64_t seed) {
  FbmConfig cfg;
  cfg.hurst = problem.params.beta_prime;
  cfg.t_start = 0.0;
  cfg.t_end = problem.horizon;
  cfg.steps = problem.steps;
  cfg.seed = seed;
  TraceWeights weights;
  weights.q.assign(problem.op.modes(), 1.0);
  HilbertPath path = sample_fbm_hilbert(cfg, weights);
  path.grid = problem.solution_grid();
  if (scale != 1.0) {
    for (double& v : path.data) v *= scale;
  }
  return path;
}

namespace {

double calibrated_from(std::vector<double> ratios, CalibrationAggregate aggregate) {
  const double base = aggregate == CalibrationAggregate::Max
                          ? *std::max_element(ratios.begin(), ratios.end())
                          : median_of(std::move(ratios));
  return std::max(base * 1.5, 1e-12);
}

}  // namespace

double calibrate_map_constant(const MildProblem& problem, double rho, std::size_t draws,
                              std::uint64_t seed, CalibrationAggregate aggregate) {
  problem.validate();
  if (draws == 0) throw std::invalid_argument("calibrate_map_constant: need at least one draw");
  const double X = problem.driver_seminorm();
  if (X == 0.0) return 1.0;  // zero driver: the integral term vanishes for every iterate
  const double K = contraction_modulus(problem.params, rho, problem.horizon);
  MapEngine engine(problem, false);
  const TimeGrid grid = problem.solution_grid();
  const Window win = full_window(grid);
  const std::size_t modes = problem.op.modes();
  const std::vector<double> zero_u0(modes, 0.0);
  HilbertPath Tu = make_hilbert_path(grid, modes);
  std::vector<double> ratios;
  ratios.reserve(draws);
  for (std::size_t draw = 0; draw < draws; ++draw) {
    const HilbertPath u = random_holder_path(problem, 1.0, derive_stream_seed(seed, draw));
    engine.apply(u, zero_u0, Tu);
    const double lhs = weighted_norm(Tu, problem.params.beta, rho, win);
    const double den = X * K * (1.0 + weighted_norm(u, problem.params.beta, rho, win));
    ratios.push_back(den > 0.0 ? lhs / den : 0.0);
  }
  return calibrated_from(std::move(ratios), aggregate);
}

double calibrate_contraction_constant(const MildProblem& problem, double rho, std::size_t pairs,
                                      std::uint64_t seed, CalibrationAggregate aggregate) {
  problem.validate();
  if (pairs == 0) throw std::invalid_argument("calibrate_contraction_constant: need at least one pair");
  const double X = problem.driver_seminorm();
  if (X == 0.0) return 1.0;
  const double K = contraction_modulus(problem.params, rho, problem.horizon);
  MapEngine engine(problem, false);
  const TimeGrid grid = problem.solution_grid();
  const Window win = full_window(grid);
  const std::size_t modes = problem.op.modes();
  HilbertPath Tu1 = make_hilbert_path(grid, modes);
  HilbertPath Tu2 = make_hilbert_path(grid, modes);
  HilbertPath diff = make_hilbert_path(grid, modes);
  std::vector<double> ratios;
  ratios.reserve(pairs);
  for (std::size_t p = 0; p < pairs; ++p) {
    const HilbertPath u1 = random_holder_path(problem, 1.0, derive_stream_seed(seed, 2 * p));
    const HilbertPath u2 = random_holder_path(problem, 1.0, derive_stream_seed(seed, 2 * p + 1));
    engine.apply(u1, problem.u0, Tu1);
    engine.apply(u2, problem.u0, Tu2);
    subtract_into(Tu1, Tu2, diff);
    const double lhs = weighted_norm(diff, problem.params.beta, rho, win);
    subtract_into(u1, u2, diff);
    const double dist = weighted_norm(diff, problem.params.beta, rho, win);
    const double size = 1.0 + modified_norm(u1, problem.params.beta, win) +
                        modified_norm(u2, problem.params.beta, win);
    const double den = X * K * size * dist;
    ratios.push_back(den > 0.0 ? lhs / den : 0.0);
  }
  return calibrated_from(std::move(ratios), aggregate);
}

std::pair<HilbertPath, SolveDiagnostics> solve_mild(const MildProblem& problem,
                                                    const SolveOptions& options) {
  problem.validate();
  if (!(options.tol > 0.0)) throw std::invalid_argument("solve_mild: tol must be positive");
  if (options.max_iterations == 0) {
    throw std::invalid_argument("solve_mild: max_iterations must be positive");
  }

  SolveDiagnostics diag;
  diag.driver_seminorm = problem.driver_seminorm();
  const double c_T = options.map_constant_override > 0.0
                         ? options.map_constant_override
                         : calibrate_contraction_constant(problem, 0.0, kCalibrationPairs,
                                                          kCalibrationSeed);
  diag.map_constant = c_T;

  RhoChoice rc;
  if (options.rho_override >= 0.0) {
    rc.rho = options.rho_override;
    rc.K = contraction_modulus(problem.params, rc.rho, problem.horizon);
    rc.product = c_T * diag.driver_seminorm * rc.K;
  } else {
    rc = choose_rho(problem, c_T);
  }
  diag.rho = rc.rho;
  diag.K_rho = rc.K;

  MapEngine engine(problem, options.force_direct_route);
  const TimeGrid grid = problem.solution_grid();
  const std::size_t modes = problem.op.modes();
  const Window win = full_window(grid);
  const double beta = problem.params.beta;

  HilbertPath u = make_hilbert_path(grid, modes);
  engine.initial_iterate(problem.u0, options.constant_initial_iterate, u);
  HilbertPath next = make_hilbert_path(grid, modes);
  HilbertPath diff = make_hilbert_path(grid, modes);

  double prev = -1.0;
  std::size_t streak = 0;
  bool converged = false;
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    engine.apply(u, problem.u0, next);
    subtract_into(next, u, diff);
    const double dist = weighted_norm(diff, beta, rc.rho, win);
    diag.iterations = it;
    if (prev > 0.0) diag.contraction_ratios.push_back(dist / prev);
    std::swap(u, next);
    if (dist < options.tol) {
      converged = true;
      break;
    }
    if (prev >= 0.0 && dist >= prev) {
      if (++streak >= 3) {
        throw numeric_error("solve_mild: Picard iteration is not contracting (weighted distance " +
                            std::to_string(dist) + " after " + std::to_string(it) +
                            " iterations at rho " + std::to_string(rc.rho) + ")");
      }
    } else {
      streak = 0;
    }
    prev = dist;
  }
  if (!converged) {
    throw numeric_error("solve_mild: no convergence within " +
                        std::to_string(options.max_iterations) +
                        " iterations (last weighted distance " + std::to_string(prev) + ")");
  }

  engine.apply(u, problem.u0, next);
  subtract_into(next, u, diff);
  diag.residual_weighted = weighted_norm(diff, beta, rc.rho, win);

  HolderParams rep = problem.params;
  rep.rho = rc.rho;
  diag.norm_report = make_norm_report(u, rep, win);
  diag.regularity.resize(grid.nodes);
  std::vector<double> coeffs(modes);
  for (std::size_t k = 0; k < grid.nodes; ++k) {
    const std::span<const double> nd = u.node(k);
    coeffs.assign(nd.begin(), nd.end());
    diag.regularity[k] = vdelta_norm(coeffs, beta, problem.op);
  }
  diag.converged = true;
  return {std::move(u), std::move(diag)};
}

MapBoundReport map_bound_certify(const MildProblem& problem, double c_T, double rho,
                                 std::size_t draws, std::uint64_t seed) {
  problem.validate();
  if (!(c_T > 0.0)) throw std::invalid_argument("map_bound_certify: c_T must be positive");
  if (!(rho >= 0.0)) throw std::invalid_argument("map_bound_certify: rho must be nonnegative");
  if (draws == 0) throw std::invalid_argument("map_bound_certify: need at least one draw");

  MapBoundReport rep;
  rep.c_T = c_T;
  rep.c_init = 2.0;
  rep.rho = rho;
  rep.K = contraction_modulus(problem.params, rho, problem.horizon);
  rep.driver_seminorm = problem.driver_seminorm();

  MapEngine engine(problem, false);
  const TimeGrid grid = problem.solution_grid();
  const Window win = full_window(grid);
  const std::size_t modes = problem.op.modes();
  const double u0_norm = l2_norm(problem.u0);
  HilbertPath Tu = make_hilbert_path(grid, modes);
  for (std::size_t draw = 0; draw < draws; ++draw) {
    const HilbertPath u = random_holder_path(problem, 1.0, derive_stream_seed(seed, draw));
    engine.apply(u, problem.u0, Tu);
    MapBoundRow row;
    row.lhs = weighted_norm(Tu, problem.params.beta, rho, win);
    row.rhs = c_T * rep.driver_seminorm * rep.K *
                  (1.0 + weighted_norm(u, problem.params.beta, rho, win)) +
              rep.c_init * u0_norm;
    row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : (row.lhs > 0.0 ? 1e300 : 0.0);
    rep.max_ratio = std::max(rep.max_ratio, row.ratio);
    rep.rows.push_back(row);
  }
  rep.pass = rep.max_ratio <= 1.0;
  return rep;
}

MapBoundRow contraction_certify(const MildProblem& problem, const HilbertPath& u1,
                                const HilbertPath& u2, double c_T, double rho) {
  problem.validate();
  if (!(c_T > 0.0)) throw std::invalid_argument("contraction_certify: c_T must be positive");
  if (!(rho >= 0.0)) throw std::invalid_argument("contraction_certify: rho must be nonnegative");
  MapEngine engine(problem, false);
  const TimeGrid grid = problem.solution_grid();
  const std::size_t modes = problem.op.modes();
  if (!same_grid(u1.grid, grid) || !same_grid(u2.grid, grid) || u1.modes != modes ||
      u2.modes != modes) {
    throw std::invalid_argument("contraction_certify: paths must live on the solution grid");
  }
  const Window win = full_window(grid);
  const std::span<const double> n1 = u1.node(0);
  const std::span<const double> n2 = u2.node(0);
  const std::vector<double> u01(n1.begin(), n1.end());
  const std::vector<double> u02(n2.begin(), n2.end());

  HilbertPath T1 = make_hilbert_path(grid, modes);
  HilbertPath T2 = make_hilbert_path(grid, modes);
  HilbertPath diff = make_hilbert_path(grid, modes);
  engine.apply(u1, u01, T1);
  engine.apply(u2, u02, T2);
  subtract_into(T1, T2, diff);

  MapBoundRow row;
  row.lhs = weighted_norm(diff, problem.params.beta, rho, win);
  subtract_into(u1, u2, diff);
  const double dist = weighted_norm(diff, problem.params.beta, rho, win);
  const double size = 1.0 + modified_norm(u1, problem.params.beta, win) +
                      modified_norm(u2, problem.params.beta, win);
  const double K = contraction_modulus(problem.params, rho, problem.horizon);
  row.rhs = c_T * problem.driver_seminorm() * size * K * dist +
            2.0 * l2_norm(u01.data(), u02.data(), modes);
  row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : (row.lhs > 0.0 ? 1e300 : 0.0);
  return row;
}

EnvelopeReport integrand_derivative_envelope(const MildProblem& problem, const HilbertPath& u,
                                             double t, double c) {
  problem.validate();
  if (!(c > 0.0)) {
    throw std::invalid_argument("integrand_derivative_envelope: constant must be positive");
  }
  const TimeGrid grid = problem.solution_grid();
  if (!same_grid(u.grid, grid) || u.modes != problem.op.modes()) {
    throw std::invalid_argument("integrand_derivative_envelope: path must live on the solution grid");
  }
  const std::size_t kt = grid.index_of(t);
  if (kt < 2) {
    throw std::invalid_argument("integrand_derivative_envelope: need at least two cells up to t");
  }
  const std::size_t modes = problem.op.modes();
  const double dt = grid.dt;
  const double alpha = problem.params.alpha;
  const double beta = problem.params.beta;

  std::vector<std::vector<double>> deriv(modes);
  ScalarPath z;
  z.grid = grid;
  z.values.assign(grid.nodes, 0.0);
  for (std::size_t i = 0; i < modes; ++i) {
    const double lam = problem.op.lambdas[i];
    const double mu = problem.G.mus[i];
    for (std::size_t m = 0; m <= kt; ++m) {
      const double decay = std::exp(-lam * (dt * static_cast<double>(kt - m)));
      z.values[m] = decay * (mu * problem.G.h(u.data[m * modes + i]));
    }
    deriv[i] = weyl_left_derivative(z, alpha, Window{0.0, t}).values;
  }

  const double size = 1.0 + modified_norm(u, beta, Window{0.0, t});
  EnvelopeReport rep;
  for (std::size_t m = 1; m < kt; ++m) {
    const double r = dt * static_cast<double>(m);
    double acc = 0.0;
    for (std::size_t i = 0; i < modes; ++i) acc += deriv[i][m - 1] * deriv[i][m - 1];
    const double lhs = std::sqrt(acc);
    const double tr = dt * static_cast<double>(kt - m);
    const double env =
        c * size * std::pow(r, -alpha) * (1.0 + std::pow(r, beta) * std::pow(tr, -beta));
    rep.r.push_back(r);
    rep.lhs.push_back(lhs);
    rep.envelope.push_back(env);
    rep.max_ratio = std::max(rep.max_ratio, env > 0.0 ? lhs / env : (lhs > 0.0 ? 1e300 : 0.0));
  }
  rep.fitted_constant = c * rep.max_ratio;
  rep.pass = !rep.r.empty() && rep.max_ratio <= 1.0;
  return rep;
}

std::vector<double> regularity_values(const MildProblem& problem, const HilbertPath& u) {
  problem.validate();
  if (!same_grid(u.grid, problem.solution_grid()) || u.modes != problem.op.modes()) {
    throw std::invalid_argument("regularity_values: path must live on the solution grid");
  }
  std::vector<double> out(u.grid.nodes, 0.0);
  std::vector<double> coeffs(u.modes);
  for (std::size_t k = 0; k < u.grid.nodes; ++k) {
    const std::span<const double> nd = u.node(k);
    coeffs.assign(nd.begin(), nd.end());
    out[k] = vdelta_norm(coeffs, problem.params.beta, problem.op);
  }
  return out;
}

double cocycle_defect(const MildProblem& problem, double t, double tau,
                      const SolveOptions& options) {
  problem.validate();
  if (!(t >= 0.0) || !(tau >= 0.0)) {
    throw std::invalid_argument("cocycle_defect: t and tau must be nonnegative");
  }
  const TimeGrid grid = problem.solution_grid();
  const std::size_t kt = grid.index_of(t);
  const std::size_t ktau = grid.index_of(tau);
  if (kt + ktau > problem.steps) {
    throw std::invalid_argument("cocycle_defect: t + tau exceeds the horizon");
  }
  if (kt == 0 && ktau == 0) return 0.0;
  if ((ktau != 0 && ktau < 2) || (kt != 0 && kt < 2) || kt + ktau < 2) {
    throw std::invalid_argument(
        "cocycle_defect: t and tau must each span at least two cells (or be zero)");
  }

  // phi(tau, omega, u0)
  std::vector<double> v = problem.u0;
  if (ktau != 0) {
    MildProblem p1 = problem;
    p1.horizon = grid.time(ktau);
    p1.steps = ktau;
    const auto r1 = solve_mild(p1, options);
    const std::span<const double> nd = r1.first.node(ktau);
    v.assign(nd.begin(), nd.end());
  }

  // phi(t + tau, omega, u0)
  MildProblem p2 = problem;
  p2.horizon = grid.time(kt + ktau);
  p2.steps = kt + ktau;
  const auto r2 = solve_mild(p2, options);
  const std::span<const double> w = r2.first.node(kt + ktau);

  // phi(t, theta_tau omega, phi(tau, omega, u0))
  std::vector<double> y = v;
  if (kt != 0) {
    MildProblem p3 = problem;
    p3.omega = wiener_shift(problem.omega, tau);
    p3.u0 = v;
    p3.horizon = grid.time(kt);
    p3.steps = kt;
    const auto r3 = solve_mild(p3, options);
    const std::span<const double> nd = r3.first.node(kt);
    y.assign(nd.begin(), nd.end());
  }

  return l2_norm(w.data(), y.data(), problem.op.modes());
}

}  // namespace pathwise
