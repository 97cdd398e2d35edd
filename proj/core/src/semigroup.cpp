#include "pathwise/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace pathwise {

SpectralOperator SpectralOperator::dirichlet_laplacian(std::size_t n_modes) {
  if (n_modes == 0) throw std::invalid_argument("SpectralOperator: need at least one mode");
  SpectralOperator op;
  op.lambdas.resize(n_modes);
  for (std::size_t i = 0; i < n_modes; ++i) {
    const double k = static_cast<double>(i + 1);
    op.lambdas[i] = k * k;
  }
  return op;
}

void SpectralOperator::validate() const {
  if (lambdas.empty()) throw std::invalid_argument("SpectralOperator: empty spectrum");
  if (!(lambdas.front() >= 0.0)) {
    throw std::invalid_argument("SpectralOperator: lambda_1 must be nonnegative");
  }
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    if (lambdas[i] < lambdas[i - 1]) {
      throw std::invalid_argument("SpectralOperator: spectrum must be nondecreasing");
    }
  }
}

VdeltaVector apply_semigroup(const SpectralOperator& op, double t, const VdeltaVector& v) {
  if (v.coeffs.size() != op.modes()) {
    throw std::invalid_argument("apply_semigroup: vector length != mode count");
  }
  VdeltaVector out = v;
  apply_semigroup_inplace(op, t, out.coeffs);
  return out;
}

void apply_semigroup_inplace(const SpectralOperator& op, double t, std::vector<double>& coeffs) {
  if (!(t >= 0.0)) throw std::invalid_argument("apply_semigroup: t must be nonnegative");
  if (coeffs.size() != op.modes()) {
    throw std::invalid_argument("apply_semigroup: vector length != mode count");
  }
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    coeffs[i] *= std::exp(-op.lambdas[i] * t);
  }
}

double vdelta_norm(const std::vector<double>& coeffs, double delta, const SpectralOperator& op) {
  if (coeffs.size() != op.modes()) {
    throw std::invalid_argument("vdelta_norm: vector length != mode count");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const double w = (delta == 0.0) ? 1.0 : std::pow(op.lambdas[i], delta);
    const double term = w * coeffs[i];
    acc += term * term;
  }
  return std::sqrt(acc);
}

double vdelta_norm(const VdeltaVector& v, double delta, const SpectralOperator& op) {
  return vdelta_norm(v.coeffs, delta, op);
}

double smoothing_norm(const SpectralOperator& op, double gamma, double t) {
  double best = 0.0;
  for (double l : op.lambdas) {
    best = std::max(best, std::pow(l, gamma) * std::exp(-l * t));
  }
  return best;
}

double identity_difference_norm(const SpectralOperator& op, double d, double t) {
  double best = 0.0;
  for (double l : op.lambdas) {
    best = std::max(best, std::pow(l, -d) * (-std::expm1(-l * t)));
  }
  return best;
}

double double_difference_norm(const SpectralOperator& op, double q, double r, double s, double t) {
  double best = 0.0;
  for (double l : op.lambdas) {
    const double v = (-std::expm1(-l * (t - s))) * (-std::expm1(-l * (r - q))) *
                     std::exp(-l * (s - r));
    best = std::max(best, v);
  }
  return best;
}

double smoothing_envelope_constant(double gamma) {
  return std::pow(2.0, gamma) * std::pow(gamma / std::exp(1.0), gamma);
}

double double_difference_constant(double beta, double gamma) {
  const double e = beta + gamma;
  if (e == 0.0) return 1.0;
  return std::pow(e / std::exp(1.0), e);
}

namespace {

void finalize(EstimateReport& rep, double constant_used) {
  rep.constant_used = constant_used;
  rep.max_ratio = 0.0;
  for (const auto& row : rep.rows) rep.max_ratio = std::max(rep.max_ratio, row.ratio);
  rep.fitted_constant = constant_used * rep.max_ratio;
  rep.pass = rep.max_ratio <= 1.0;
}

}  // namespace

EstimateReport smoothing_estimate_check(const SpectralOperator& op, double gamma,
                                        const std::vector<double>& t_samples) {
  op.validate();
  if (!(gamma > 0.0)) throw std::invalid_argument("smoothing_estimate_check: gamma must be > 0");
  const double c = smoothing_envelope_constant(gamma);
  const double rate = op.lambdas.front() / 2.0;
  EstimateReport rep;
  for (double t : t_samples) {
    if (!(t > 0.0)) throw std::invalid_argument("smoothing_estimate_check: samples must be > 0");
    EstimateRow row;
    row.t = t;
    row.exact_norm = smoothing_norm(op, gamma, t);
    row.bound = c * std::pow(t, -gamma) * std::exp(-rate * t);
    row.ratio = row.exact_norm / row.bound;
    rep.rows.push_back(row);
  }
  finalize(rep, c);
  return rep;
}

EstimateReport hoelder_estimate_check(const SpectralOperator& op, double sigma, double theta,
                                      double mu, const std::vector<double>& t_samples) {
  op.validate();
  (void)mu;  // cancels between the source and target weights
  if (!(theta >= 0.0)) throw std::invalid_argument("hoelder_estimate_check: theta must be >= 0");
  if (!(sigma >= theta) || !(sigma <= 1.0 + theta)) {
    throw std::invalid_argument("hoelder_estimate_check: need theta <= sigma <= 1 + theta");
  }
  const double d = sigma - theta;
  EstimateReport rep;
  for (double t : t_samples) {
    if (!(t >= 0.0)) throw std::invalid_argument("hoelder_estimate_check: samples must be >= 0");
    EstimateRow row;
    row.t = t;
    row.exact_norm = identity_difference_norm(op, d, t);
    row.bound = std::pow(t, d);
    row.ratio = (row.bound > 0.0) ? row.exact_norm / row.bound
                                  : (row.exact_norm == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    rep.rows.push_back(row);
  }
  finalize(rep, 1.0);
  return rep;
}

EstimateReport double_difference_check(const SpectralOperator& op, double beta, double gamma,
                                       const std::vector<std::array<double, 4>>& quadruples) {
  op.validate();
  if (!(beta >= 0.0) || !(gamma >= 0.0) || !(beta + gamma <= 1.0)) {
    throw std::invalid_argument("double_difference_check: need beta, gamma >= 0, beta + gamma <= 1");
  }
  const double c = double_difference_constant(beta, gamma);
  EstimateReport rep;
  for (const auto& quad : quadruples) {
    const double q = quad[0], r = quad[1], s = quad[2], t = quad[3];
    if (!(0.0 <= q && q <= r && r <= s && s <= t)) {
      throw std::invalid_argument("double_difference_check: quadruple must satisfy 0 <= q <= r <= s <= t");
    }
    EstimateRow row;
    row.t = t;
    row.exact_norm = double_difference_norm(op, q, r, s, t);
    if (s > r) {
      row.bound = c * std::pow(t - s, beta) * std::pow(r - q, gamma) *
                  std::pow(s - r, -(beta + gamma));
      row.ratio = (row.bound > 0.0) ? row.exact_norm / row.bound : (row.exact_norm == 0.0 ? 0.0 : 1.0);
    } else {
      row.bound = std::numeric_limits<double>::infinity();
      row.ratio = 0.0;
    }
    rep.rows.push_back(row);
  }
  finalize(rep, c);
  return rep;
}

std::vector<std::array<double, 4>> random_quadruples(std::size_t count, double t_max,
                                                     std::uint64_t seed) {
  if (!(t_max > 0.0)) throw std::invalid_argument("random_quadruples: t_max must be positive");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> uni(0.0, t_max);
  std::vector<std::array<double, 4>> out(count);
  for (auto& quad : out) {
    for (double& x : quad) x = uni(gen);
    std::sort(quad.begin(), quad.end());
  }
  return out;
}

std::vector<double> log_spaced(double t_min, double t_max, std::size_t count) {
  if (!(t_min > 0.0) || !(t_max > t_min)) {
    throw std::invalid_argument("log_spaced: need 0 < t_min < t_max");
  }
  if (count < 2) throw std::invalid_argument("log_spaced: need at least two points");
  std::vector<double> out(count);
  const double a = std::log(t_min);
  const double b = std::log(t_max);
  for (std::size_t i = 0; i < count; ++i) {
    const double w = static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = std::exp(a + (b - a) * w);
  }
  out.front() = t_min;
  out.back() = t_max;
  return out;
}

}  // namespace pathwise
