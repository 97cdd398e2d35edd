#include "pathwise/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pathwise/rng.hpp"

namespace pathwise {

NoiseProfile parse_noise_profile(const std::string& name) {
  if (name == "identity") return NoiseProfile::Identity;
  if (name == "tanh") return NoiseProfile::Tanh;
  if (name == "constant") return NoiseProfile::Constant;
  if (name == "affine") return NoiseProfile::Affine;
  throw std::invalid_argument("unknown noise profile '" + name +
                              "' (expected identity|tanh|constant|affine)");
}

std::string to_string(NoiseProfile profile) {
  switch (profile) {
    case NoiseProfile::Identity: return "identity";
    case NoiseProfile::Tanh: return "tanh";
    case NoiseProfile::Constant: return "constant";
    case NoiseProfile::Affine: return "affine";
  }
  return "?";
}

DiagonalNemytskii DiagonalNemytskii::make(NoiseProfile profile, std::vector<double> mus,
                                          double affine_offset, double affine_slope) {
  if (mus.empty()) throw std::invalid_argument("DiagonalNemytskii: need at least one mode");
  DiagonalNemytskii g;
  g.profile = profile;
  g.mus = std::move(mus);
  g.affine_offset = affine_offset;
  g.affine_slope = affine_slope;
  double sum_sq = 0.0;
  double max_abs = 0.0;
  for (double m : g.mus) {
    sum_sq += m * m;
    max_abs = std::max(max_abs, std::abs(m));
  }
  g.c_G = std::abs(g.h(0.0)) * std::sqrt(sum_sq);
  g.c_DG = max_abs * g.sup_h_prime();
  g.c_D2G = max_abs * g.sup_h_second();
  return g;
}

std::vector<double> DiagonalNemytskii::harmonic_mus(std::size_t modes) {
  std::vector<double> mus(modes);
  for (std::size_t i = 0; i < modes; ++i) mus[i] = 1.0 / static_cast<double>(i + 1);
  return mus;
}

double DiagonalNemytskii::h(double x) const {
  switch (profile) {
    case NoiseProfile::Identity: return x;
    case NoiseProfile::Tanh: return std::tanh(x);
    case NoiseProfile::Constant: return 1.0;
    case NoiseProfile::Affine: return affine_offset + affine_slope * x;
  }
  return 0.0;
}

double DiagonalNemytskii::h_prime(double x) const {
  switch (profile) {
    case NoiseProfile::Identity: return 1.0;
    case NoiseProfile::Tanh: {
      const double c = std::cosh(x);
      return 1.0 / (c * c);
    }
    case NoiseProfile::Constant: return 0.0;
    case NoiseProfile::Affine: return affine_slope;
  }
  return 0.0;
}

double DiagonalNemytskii::sup_h_prime() const {
  switch (profile) {
    case NoiseProfile::Identity: return 1.0;
    case NoiseProfile::Tanh: return 1.0;  // sech^2 at 0
    case NoiseProfile::Constant: return 0.0;
    case NoiseProfile::Affine: return std::abs(affine_slope);
  }
  return 0.0;
}

double DiagonalNemytskii::sup_h_second() const {
  switch (profile) {
    case NoiseProfile::Identity: return 0.0;
    case NoiseProfile::Tanh: return 4.0 / (3.0 * std::sqrt(3.0));  // |2 sech^2 tanh| max
    case NoiseProfile::Constant: return 0.0;
    case NoiseProfile::Affine: return 0.0;
  }
  return 0.0;
}

void DiagonalNemytskii::apply(const double* u, double* out) const {
  for (std::size_t i = 0; i < mus.size(); ++i) out[i] = mus[i] * h(u[i]);
}

std::vector<double> DiagonalNemytskii::apply(const std::vector<double>& u) const {
  if (u.size() != mus.size()) throw std::invalid_argument("DiagonalNemytskii: length mismatch");
  std::vector<double> out(mus.size());
  apply(u.data(), out.data());
  return out;
}

double DiagonalNemytskii::hs_norm(const std::vector<double>& u) const {
  if (u.size() != mus.size()) throw std::invalid_argument("DiagonalNemytskii: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    const double e = mus[i] * h(u[i]);
    acc += e * e;
  }
  return std::sqrt(acc);
}

namespace {

double l2_norm(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

std::vector<double> diff(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

}  // namespace

CoefficientCheckReport derivative_bounds_certify(const DiagonalNemytskii& G,
                                                 std::size_t sample_count, std::uint64_t seed) {
  if (sample_count == 0) throw std::invalid_argument("derivative_bounds_certify: need samples");
  const std::size_t n = G.modes();
  GaussianStream gauss(seed);
  CoefficientCheckReport rep;
  rep.samples = sample_count;

  auto draw = [&] {
    std::vector<double> v(n);
    for (double& x : v) x = 2.0 * gauss.next();
    return v;
  };

  for (std::size_t s = 0; s < sample_count; ++s) {
    const auto u1 = draw(), u2 = draw(), v1 = draw(), v2 = draw();
    const auto gu1 = G.apply(u1), gu2 = G.apply(u2), gv1 = G.apply(v1), gv2 = G.apply(v2);

    double lhs[3], rhs[3];
    lhs[0] = l2_norm(gu1);
    rhs[0] = G.c_G + G.c_DG * l2_norm(u1);

    lhs[1] = l2_norm(diff(gu1, gv1));
    rhs[1] = G.c_DG * l2_norm(diff(u1, v1));

    lhs[2] = l2_norm(diff(diff(gu1, gv1), diff(gu2, gv2)));
    rhs[2] = G.c_DG * l2_norm(diff(diff(u1, v1), diff(u2, v2))) +
             G.c_D2G * l2_norm(diff(u1, u2)) * (l2_norm(diff(u1, v1)) + l2_norm(diff(u2, v2)));

    static const char* names[3] = {"growth", "lipschitz", "difference-of-differences"};
    for (int k = 0; k < 3; ++k) {
      const double slack = 1e-12 * (1.0 + rhs[k]);
      if (rhs[k] > 0.0) rep.max_ratio[k] = std::max(rep.max_ratio[k], lhs[k] / rhs[k]);
      if (lhs[k] > rhs[k] + slack) {
        ++rep.violations;
        if (rep.first_violation.empty()) {
          rep.first_violation = std::string(names[k]) + " inequality at sample " +
                                std::to_string(s) + ": lhs " + std::to_string(lhs[k]) +
                                " > rhs " + std::to_string(rhs[k]);
        }
      }
    }
  }
  rep.pass = rep.violations == 0;
  return rep;
}

}  // namespace pathwise
