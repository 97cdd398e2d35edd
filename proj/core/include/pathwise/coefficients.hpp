#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pathwise {

// Scalar profile h applied mode-wise by the diagonal noise coefficient.
enum class NoiseProfile { Identity, Tanh, Constant, Affine };

NoiseProfile parse_noise_profile(const std::string& name);  // identity|tanh|constant|affine
std::string to_string(NoiseProfile profile);

// Diagonal Nemytskii coefficient G(u) = diag(mu_i h(u_i)), mapping V into the
// Hilbert-Schmidt operators on V.  The three constants are recomputed from
// their defining formulas at construction:
//   c_G    = |h(0)| (sum mu_i^2)^(1/2)      (Hilbert-Schmidt norm of G(0))
//   c_DG   = max|mu_i| sup|h'|
//   c_D2G  = max|mu_i| sup|h''|
struct DiagonalNemytskii {
  std::vector<double> mus;
  NoiseProfile profile = NoiseProfile::Identity;
  double affine_offset = 0.0;  // a in h(x) = a + b x
  double affine_slope = 1.0;   // b
  double c_G = 0.0;
  double c_DG = 0.0;
  double c_D2G = 0.0;

  static DiagonalNemytskii make(NoiseProfile profile, std::vector<double> mus,
                                double affine_offset = 0.0, double affine_slope = 1.0);

  // mu_i = 1/i, i = 1..modes.
  static std::vector<double> harmonic_mus(std::size_t modes);

  std::size_t modes() const { return mus.size(); }

  double h(double x) const;
  double h_prime(double x) const;
  double sup_h_prime() const;
  double sup_h_second() const;

  // Diagonal entries mu_i h(u_i); u and out have length modes().
  void apply(const double* u, double* out) const;
  std::vector<double> apply(const std::vector<double>& u) const;

  // Hilbert-Schmidt norm of G(u): (sum mu_i^2 h(u_i)^2)^(1/2).
  double hs_norm(const std::vector<double>& u) const;
};

// Monte Carlo certification of the three derivative-bound inequalities
//   |G(u1)|         <= c_G + c_DG |u1|
//   |G(u1)-G(v1)|   <= c_DG |u1-v1|
//   |G(u1)-G(v1)-G(u2)+G(v2)|
//                   <= c_DG |u1-v1-(u2-v2)|
//                      + c_D2G |u1-u2| (|u1-v1| + |u2-v2|)
// over random Gaussian quadruples (u1, u2, v1, v2).
struct CoefficientCheckReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double max_ratio[3] = {0.0, 0.0, 0.0};  // per inequality: max lhs / rhs
  std::string first_violation;            // empty when pass
  bool pass = false;
};

CoefficientCheckReport derivative_bounds_certify(const DiagonalNemytskii& G,
                                                 std::size_t sample_count, std::uint64_t seed);

}  // namespace pathwise
