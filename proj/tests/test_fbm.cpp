#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "pathwise/errors.hpp"
#include "pathwise/fbm.hpp"
#include "pathwise/holder.hpp"
#include "pathwise/rng.hpp"
#include "support/oracles.hpp"

using namespace pathwise;

namespace {

FbmConfig config(double hurst, std::size_t steps, std::uint64_t seed, double t_start = 0.0,
                 double t_end = 1.0) {
  FbmConfig cfg;
  cfg.hurst = hurst;
  cfg.t_start = t_start;
  cfg.t_end = t_end;
  cfg.steps = steps;
  cfg.seed = seed;
  return cfg;
}

// Empirical grid covariance of `count` draws from `sample`, compared entrywise
// against fbm_covariance with the Wishart-type standard error
// Var(c_hat_ij) = (c_ii c_jj + c_ij^2) / count.  Returns the worst |dev| / SE.
template <class Sampler>
double covariance_max_z(const FbmConfig& base, std::size_t count, Sampler sample) {
  const TimeGrid grid = base.grid();
  const std::size_t n = grid.nodes;
  std::vector<double> acc(n * n, 0.0);
  FbmConfig cfg = base;
  for (std::size_t s = 0; s < count; ++s) {
    cfg.seed = derive_stream_seed(base.seed, s);
    const ScalarPath path = sample(cfg);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) acc[i * n + j] += path.values[i] * path.values[j];
    }
  }
  double worst = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double ti = grid.time(i), tj = grid.time(j);
      const double c = fbm_covariance(ti, tj, base.hurst);
      const double cii = fbm_covariance(ti, ti, base.hurst);
      const double cjj = fbm_covariance(tj, tj, base.hurst);
      const double se = std::sqrt((cii * cjj + c * c) / static_cast<double>(count));
      const double dev = std::fabs(acc[i * n + j] / static_cast<double>(count) - c);
      worst = std::max(worst, dev / se);
    }
  }
  return worst;
}

}  // namespace

TEST_SUITE("fbm") {

TEST_CASE("config validation rejects bad parameters") {
  CHECK_THROWS_AS(config(1.2, 64, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(config(0.0, 64, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(config(1.0, 64, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(config(0.75, 0, 1).validate(), std::invalid_argument);
  CHECK_NOTHROW(config(0.5, 64, 1).validate());  // the sampler itself covers all of (0,1)
  CHECK_THROWS_AS(config(0.75, 64, 1, 0.25, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(config(0.75, 64, 1, -1.0, -0.5).validate(), std::invalid_argument);
  CHECK_NOTHROW(config(0.51, 64, 1, -0.5, 0.5).validate());
}

TEST_CASE("grid is zero anchored") {
  const FbmConfig cfg = config(0.75, 8, 3, -0.75, 1.25);
  const TimeGrid grid = cfg.grid();
  CHECK(grid.nodes == 9);
  CHECK(grid.dt == doctest::Approx(0.25).epsilon(1e-15));
  const std::size_t zero = cfg.zero_node();
  CHECK(grid.time(zero) == 0.0);  // exact: t0 = -i0 * dt by construction
  CHECK(zero == 3);
}

TEST_CASE("sampler starts at zero, is deterministic, and lattice valued") {
  const FbmConfig cfg = config(0.7, 256, 11, -0.25, 0.75);
  const ScalarPath a = sample_fbm_1d(cfg);
  const ScalarPath b = sample_fbm_1d(cfg);
  CHECK(a.values == b.values);
  CHECK(a.values[cfg.zero_node()] == 0.0);
  const double scale = 4294967296.0;  // 2^32
  for (double v : a.values) {
    const double snapped = std::nearbyint(v * scale) / scale;
    CHECK(v == snapped);
  }
  const ScalarPath c = sample_fbm_1d(config(0.7, 256, 12, -0.25, 0.75));
  CHECK(a.values != c.values);
}

TEST_CASE("fgn covariance closed forms") {
  CHECK(fgn_covariance(0.0, 0.75) == doctest::Approx(1.0).epsilon(1e-15));
  // r(1) = 2^(2H-1) - 1; H = 0.75 gives sqrt(2) - 1.
  CHECK(fgn_covariance(1.0, 0.75) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));
  CHECK(fgn_covariance(-1.0, 0.75) == fgn_covariance(1.0, 0.75));
  // H = 1/2 would make increments independent; H > 1/2 gives positive memory.
  CHECK(fgn_covariance(5.0, 0.9) > 0.0);
  CHECK(fbm_covariance(1.0, 1.0, 0.75) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fbm_covariance(0.5, 1.0, 0.6) ==
        doctest::Approx(0.5 * (std::pow(0.5, 1.2) + 1.0 - std::pow(0.5, 1.2))).epsilon(1e-15));
  CHECK(fbm_covariance(-0.5, 0.5, 0.8) ==
        doctest::Approx(0.5 * (2.0 * std::pow(0.5, 1.6) - 1.0)).epsilon(1e-12));
}

TEST_CASE("circulant law matches the covariance formula" * doctest::timeout(60)) {
  const double z = covariance_max_z(config(0.75, 16, 1), 3000,
                                    [](const FbmConfig& c) { return sample_fbm_1d(c); });
  CHECK(z <= 3.0);
}

TEST_CASE("cholesky law matches the covariance formula" * doctest::timeout(60)) {
  const double z = covariance_max_z(config(0.65, 16, 4052), 3000,
                                    [](const FbmConfig& c) { return sample_fbm_cholesky(c); });
  CHECK(z <= 3.0);
}

TEST_CASE("cholesky sampler enforces its size cap") {
  CHECK_THROWS_AS(sample_fbm_cholesky(config(0.75, 64, 1), 32), std::invalid_argument);
}

TEST_CASE("circulant embedding eigenvalues stay nonnegative after clipping") {
  for (double hurst : {0.55, 0.75, 0.95}) {
    std::vector<double> autocov(513);
    for (std::size_t k = 0; k < autocov.size(); ++k) {
      autocov[k] = fgn_covariance(static_cast<double>(k), hurst);
    }
    const std::vector<double> eig = detail::circulant_embedding_eigenvalues(autocov);
    CHECK(eig.size() == 1024);
    double min_eig = eig[0];
    for (double e : eig) min_eig = std::min(min_eig, e);
    CHECK(min_eig >= -1e-10 * eig[0]);
  }
}

TEST_CASE("hilbert modes are weighted independent scalar streams") {
  const FbmConfig cfg = config(0.75, 128, 77);
  const TraceWeights weights = TraceWeights::polynomial(4, 2.0);
  const HilbertPath vec = sample_fbm_hilbert(cfg, weights);
  CHECK(vec.modes == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    FbmConfig mode_cfg = cfg;
    mode_cfg.seed = derive_stream_seed(cfg.seed, i);
    const ScalarPath scalar = sample_fbm_1d(mode_cfg);
    const ScalarPath extracted = mode_path(vec, i);
    const double w = std::sqrt(weights.q[i]);
    for (std::size_t k = 0; k < scalar.values.size(); ++k) {
      CHECK(extracted.values[k] == detail::snap_to_lattice(w * scalar.values[k]));
    }
  }
}

TEST_CASE("zero trace weight produces an exactly zero mode") {
  TraceWeights weights = TraceWeights::polynomial(3, 2.0);
  weights.q[1] = 0.0;
  const HilbertPath vec = sample_fbm_hilbert(config(0.8, 64, 5), weights);
  const ScalarPath dead = mode_path(vec, 1);
  for (double v : dead.values) CHECK(v == 0.0);
}

TEST_CASE("trace weights validate") {
  TraceWeights weights = TraceWeights::polynomial(3);
  CHECK_NOTHROW(weights.validate());
  weights.q[0] = -0.1;
  CHECK_THROWS_AS(weights.validate(), std::invalid_argument);
  CHECK(TraceWeights::polynomial(2, 2.0).q[1] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("wiener shift relabels, re-anchors, and composes bitwise") {
  const ScalarPath w = sample_fbm_1d(config(0.75, 16, 9));
  const ScalarPath s1 = wiener_shift(w, 0.25);
  CHECK(s1.grid.t0 == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(s1.grid.nodes == w.grid.nodes);
  CHECK(s1.value_at(0.0) == 0.0);  // exact on the lattice
  const ScalarPath s2 = wiener_shift(s1, 0.25);
  const ScalarPath direct = wiener_shift(w, 0.5);
  CHECK(s2.grid.t0 == direct.grid.t0);
  CHECK(s2.values == direct.values);

  const HilbertPath vec = sample_fbm_hilbert(config(0.75, 16, 9), TraceWeights::polynomial(3));
  const HilbertPath v2 = wiener_shift(wiener_shift(vec, 0.25), 0.25);
  const HilbertPath vd = wiener_shift(vec, 0.5);
  CHECK(v2.data == vd.data);
}

TEST_CASE("wiener shift rejects off-grid offsets") {
  const ScalarPath w = sample_fbm_1d(config(0.75, 16, 9));
  CHECK_THROWS_AS(wiener_shift(w, 0.3), std::invalid_argument);
}

TEST_CASE("dyadic exponent estimate recovers the Hurst index") {
  for (double hurst : {0.6, 0.85}) {
    const ScalarPath w = sample_fbm_1d(config(hurst, 4096, 13));
    const double est = dyadic_exponent_estimate(w);
    CHECK(est == doctest::Approx(hurst).epsilon(0.12));
  }
}

TEST_CASE("derived stream seeds differ across streams") {
  const std::uint64_t master = 42;
  CHECK(derive_stream_seed(master, 0) != derive_stream_seed(master, 1));
  CHECK(derive_stream_seed(master, 0) != derive_stream_seed(master + 1, 0));
  CHECK(splitmix64(1) != splitmix64(2));
}

}  // TEST_SUITE
