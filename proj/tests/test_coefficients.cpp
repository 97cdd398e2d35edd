#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pathwise/coefficients.hpp"

using namespace pathwise;

TEST_SUITE("coefficients") {

TEST_CASE("profile names round trip") {
  for (const char* name : {"identity", "tanh", "constant", "affine"}) {
    CHECK(to_string(parse_noise_profile(name)) == name);
  }
  CHECK_THROWS_AS(parse_noise_profile("cubic"), std::invalid_argument);
}

TEST_CASE("harmonic weights") {
  const std::vector<double> mus = DiagonalNemytskii::harmonic_mus(4);
  CHECK(mus == std::vector<double>{1.0, 0.5, 1.0 / 3.0, 0.25});
  CHECK_THROWS_AS(DiagonalNemytskii::make(NoiseProfile::Identity, {}), std::invalid_argument);
}

TEST_CASE("constants from their defining formulas") {
  const std::vector<double> mus = {0.5, -2.0, 1.0};
  const double max_mu = 2.0;
  const double l2_mu = std::sqrt(0.25 + 4.0 + 1.0);

  const DiagonalNemytskii ident = DiagonalNemytskii::make(NoiseProfile::Identity, mus);
  CHECK(ident.c_G == 0.0);  // h(0) = 0
  CHECK(ident.c_DG == max_mu);
  CHECK(ident.c_D2G == 0.0);

  const DiagonalNemytskii th = DiagonalNemytskii::make(NoiseProfile::Tanh, mus);
  CHECK(th.c_G == 0.0);
  CHECK(th.c_DG == max_mu);  // sup sech^2 = 1 at 0
  // sup |tanh''| = 4 / (3 sqrt 3), attained at tanh(x) = 1/sqrt 3.
  CHECK(th.c_D2G == doctest::Approx(max_mu * 4.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-15));

  const DiagonalNemytskii cst = DiagonalNemytskii::make(NoiseProfile::Constant, mus);
  CHECK(cst.c_G == doctest::Approx(l2_mu).epsilon(1e-15));  // h == 1
  CHECK(cst.c_DG == 0.0);
  CHECK(cst.c_D2G == 0.0);

  const DiagonalNemytskii aff = DiagonalNemytskii::make(NoiseProfile::Affine, mus, 1.5, -0.75);
  CHECK(aff.c_G == doctest::Approx(1.5 * l2_mu).epsilon(1e-15));
  CHECK(aff.c_DG == doctest::Approx(max_mu * 0.75).epsilon(1e-15));
  CHECK(aff.c_D2G == 0.0);
}

TEST_CASE("apply and hs_norm") {
  const DiagonalNemytskii g = DiagonalNemytskii::make(NoiseProfile::Tanh, {1.0, 0.5});
  const std::vector<double> u = {0.3, -2.0};
  const std::vector<double> out = g.apply(u);
  CHECK(out[0] == std::tanh(0.3));
  CHECK(out[1] == 0.5 * std::tanh(-2.0));
  CHECK(g.hs_norm(u) == doctest::Approx(std::hypot(out[0], out[1])).epsilon(1e-15));
  CHECK_THROWS_AS(g.apply(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("h_prime agrees with a finite difference") {
  for (NoiseProfile profile :
       {NoiseProfile::Identity, NoiseProfile::Tanh, NoiseProfile::Affine}) {
    const DiagonalNemytskii g = DiagonalNemytskii::make(profile, {1.0}, 0.4, 1.7);
    for (double x : {-1.5, -0.2, 0.0, 0.8, 2.5}) {
      const double h = 1e-6;
      const double fd = (g.h(x + h) - g.h(x - h)) / (2.0 * h);
      CHECK(g.h_prime(x) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("derivative bounds certify on every shipped profile") {
  for (NoiseProfile profile : {NoiseProfile::Identity, NoiseProfile::Tanh,
                               NoiseProfile::Constant, NoiseProfile::Affine}) {
    const DiagonalNemytskii g =
        DiagonalNemytskii::make(profile, DiagonalNemytskii::harmonic_mus(6), 0.3, 1.2);
    const CoefficientCheckReport rep = derivative_bounds_certify(g, 2000, 2024);
    CHECK(rep.pass);
    CHECK(rep.samples == 2000);
    CHECK(rep.violations == 0);
    CHECK(rep.first_violation.empty());
    for (double ratio : rep.max_ratio) CHECK(ratio <= 1.0);
  }
}

TEST_CASE("certification report is deterministic in the seed") {
  const DiagonalNemytskii g =
      DiagonalNemytskii::make(NoiseProfile::Tanh, DiagonalNemytskii::harmonic_mus(3));
  const CoefficientCheckReport a = derivative_bounds_certify(g, 500, 9);
  const CoefficientCheckReport b = derivative_bounds_certify(g, 500, 9);
  CHECK(a.max_ratio[0] == b.max_ratio[0]);
  CHECK(a.max_ratio[1] == b.max_ratio[1]);
  CHECK(a.max_ratio[2] == b.max_ratio[2]);
}

}  // TEST_SUITE
