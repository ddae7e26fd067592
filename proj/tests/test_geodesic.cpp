#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gmrfgeo/errors.hpp"
#include "gmrfgeo/geodesic.hpp"
#include "oracles.hpp"

using namespace gmrfgeo;

namespace {

IntegratorConfig frozen_iid(double sigma2) {
  IntegratorConfig cfg;
  cfg.mode = CovarianceMode::frozen;
  cfg.frozen_stats = independence_stats(sigma2);
  return cfg;
}

IntegratorConfig small_mcmc(std::uint64_t seed) {
  IntegratorConfig cfg;
  cfg.mcmc.rows = cfg.mcmc.cols = 24;
  cfg.mcmc.burn_in_sweeps = 30;
  cfg.mcmc.sweeps_per_sample = 2;
  cfg.mcmc.seed = seed;
  cfg.n = 40;
  cfg.b = 1.0;
  return cfg;
}

}  // namespace

TEST_CASE("geodesic right-hand side") {
  ChristoffelTensor zero;
  GeodesicState s;
  CHECK(geodesic_rhs(s, zero).isZero(0.0));

  s.alpha = {1, 0, 0};
  StateVector expected;
  expected << 1, 0, 0, 0, 0, 0;
  CHECK(geodesic_rhs(s, zero) == expected);

  ChristoffelTensor c;
  c[1](0, 0) = 2.5;
  CHECK(geodesic_rhs(s, c)[4] == -2.5);
}

TEST_CASE("rk4_step") {
  ChristoffelTensor zero;
  GeodesicState s{0.0, {0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}};
  const GeodesicState n = rk4_step(s, zero, 0.025);
  CHECK(n.gamma == Vec3(0.025, 1.0, 0.0));
  CHECK(n.alpha == s.alpha);
  CHECK(n.t == 0.025);
  CHECK_THROWS_AS(rk4_step(s, zero, 0.0), InvalidInputError);

  // Step-halving consistency with Gamma frozen at the independence point.
  const ChristoffelTensor g = christoffel_at({0, 1, 0}, independence_stats(1.0), 0.01);
  GeodesicState s0{0.0, {0.0, 1.0, 0.0}, {0.1, 0.1, 0.05}};
  const GeodesicState one = rk4_step(s0, g, 0.025);
  const GeodesicState two = rk4_step(rk4_step(s0, g, 0.0125), g, 0.0125);
  CHECK((one.gamma - two.gamma).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((one.alpha - two.alpha).cwiseAbs().maxCoeff() < 1e-8);

  ChristoffelTensor huge;
  huge[0].setConstant(1e300);
  GeodesicState fast{0.0, {0, 1, 0}, {1e10, 1e10, 1e10}};
  CHECK_THROWS_AS(rk4_step(fast, huge, 1.0), DivergenceError);
}

TEST_CASE("integrate: rest state and defaults") {
  for (CovarianceMode mode : {CovarianceMode::frozen, CovarianceMode::mcmc}) {
    IntegratorConfig cfg = small_mcmc(1);
    cfg.mode = mode;
    const GeodesicCurve c = integrate({0, 1, 0}, {0, 0, 0}, cfg);
    REQUIRE_FALSE(c.diverged_at);
    CHECK(c.states.size() == 41);
    CHECK(c.distance == 0.0);
    CHECK(c.back().gamma == Vec3(0, 1, 0));
  }
  const IntegratorConfig d;
  CHECK(d.a == 0.0);
  CHECK(d.b == 5.0);
  CHECK(d.n == 200);
  CHECK(d.h() == 0.025);
  CHECK(d.lambda == 0.01);
  CHECK(d.alpha_magnitude_warn == 0.5);
  CHECK(d.mcmc.kernel == SamplerKernel::uncorrected);
  CHECK(d.resolved_update() == ChristoffelUpdate::per_iteration);
}

TEST_CASE("integrate: distance accounting and polyline inequality") {
  const IntegratorConfig cfg = frozen_iid(1.0);
  const GeodesicCurve c = integrate({0, 1, 0}, {0.1, 0.1, 0.05}, cfg);
  REQUIRE_FALSE(c.diverged_at);
  REQUIRE(c.states.size() == 201);
  double sum = 0.0;
  for (int i = 0; i < cfg.n; ++i) sum += c.states[static_cast<std::size_t>(i)].alpha.norm() * cfg.h();
  CHECK(c.distance == doctest::Approx(sum).epsilon(1e-14));
  CHECK(c.distance >= euclidean_distance(c.front().gamma, c.back().gamma) - 1e-9);
  CHECK(c.riemannian_length > 0.0);
  CHECK(c.states.back().t == doctest::Approx(5.0));
}

TEST_CASE("integrate: large initial tangents warn but still run") {
  IntegratorConfig cfg = frozen_iid(1.0);
  cfg.n = 4;
  const GeodesicCurve c = integrate({0, 1, 0}, {0.6, 0, 0}, cfg);
  CHECK(c.warnings.size() == 1);
  CHECK(integrate({0, 1, 0}, {0.5, 0, 0}, cfg).warnings.empty());
}

TEST_CASE("integrate: input validation") {
  IntegratorConfig cfg = frozen_iid(1.0);
  CHECK_THROWS_AS(integrate({0, 0, 0}, {0, 0, 0}, cfg), DomainError);
  CHECK_THROWS_AS(integrate({0, 1, NAN}, {0, 0, 0}, cfg), InvalidInputError);
  cfg.n = 0;
  CHECK_THROWS_AS(integrate({0, 1, 0}, {0, 0, 0}, cfg), InvalidInputError);
  cfg.n = 10;
  cfg.b = cfg.a;
  CHECK_THROWS_AS(integrate({0, 1, 0}, {0, 0, 0}, cfg), InvalidInputError);
}

TEST_CASE("integrate: sigma2 leaving the domain truncates the curve") {
  IntegratorConfig cfg = frozen_iid(1.0);
  cfg.n = 5;
  const GeodesicCurve c = integrate({0, 0.05, 0}, {0, -10.0, 0}, cfg);
  REQUIRE(c.diverged_at.has_value());
  CHECK(c.states.size() == static_cast<std::size_t>(*c.diverged_at) + 1);
  CHECK_FALSE(c.divergence_reason.empty());
  for (const auto& s : c.states) CHECK(s.gamma[kSigma2] > 0.0);
}

TEST_CASE("integrate: frozen mode samples statistics once when none are supplied") {
  IntegratorConfig cfg = small_mcmc(5);
  cfg.mode = CovarianceMode::frozen;
  const GeodesicCurve a = integrate({0, 1, 0}, {0.1, 0.1, 0.05}, cfg);
  const GeodesicCurve b = integrate({0, 1, 0}, {0.1, 0.1, 0.05}, cfg);
  REQUIRE(a.frozen_stats.has_value());
  CHECK(a.back().gamma == b.back().gamma);
  cfg.frozen_stats = a.frozen_stats;
  CHECK(integrate({0, 1, 0}, {0.1, 0.1, 0.05}, cfg).back().gamma == a.back().gamma);
}

TEST_CASE("integrate: mcmc mode is reproducible for a fixed seed") {
  const IntegratorConfig cfg = small_mcmc(77);
  const GeodesicCurve a = integrate({0, 1, 0}, {0.1, 0.1, 0.2}, cfg);
  const GeodesicCurve b = integrate({0, 1, 0}, {0.1, 0.1, 0.2}, cfg);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    CHECK(a.states[k].gamma == b.states[k].gamma);
    CHECK(a.states[k].alpha == b.states[k].alpha);
  }
  CHECK(a.distance == b.distance);
  IntegratorConfig other = cfg;
  other.mcmc.seed = 78;
  CHECK(integrate({0, 1, 0}, {0.1, 0.1, 0.2}, other).back().gamma != a.back().gamma);
}

TEST_CASE("per-stage evaluation converges at fourth order; per-step holding does not") {
  auto endpoint = [](int n, ChristoffelUpdate u) {
    IntegratorConfig cfg = frozen_iid(1.0);
    cfg.n = n;
    cfg.update = u;
    return integrate({0, 1, 0}, {0.1, 0.1, 0.05}, cfg).back().gamma;
  };
  const Vec3 ref = endpoint(3200, ChristoffelUpdate::per_stage);
  const double e1 = (endpoint(100, ChristoffelUpdate::per_stage) - ref).norm();
  const double e2 = (endpoint(200, ChristoffelUpdate::per_stage) - ref).norm();
  const double e3 = (endpoint(400, ChristoffelUpdate::per_stage) - ref).norm();
  CHECK(e1 / e2 >= 8.0);
  CHECK(e2 / e3 >= 8.0);

  const Vec3 ref_step = endpoint(3200, ChristoffelUpdate::per_iteration);
  const double s1 = (endpoint(100, ChristoffelUpdate::per_iteration) - ref_step).norm();
  const double s2 = (endpoint(200, ChristoffelUpdate::per_iteration) - ref_step).norm();
  CHECK(s1 / s2 < 4.0);
}

TEST_CASE("reverse_run") {
  SUBCASE("frozen mode returns to the start") {
    const IntegratorConfig cfg = frozen_iid(1.0);
    const GeodesicCurve fwd = integrate({0, 1, 0}, {0.1, 0.1, 0.05}, cfg);
    const ReversalResult r = reverse_run(fwd, cfg);
    CHECK(euclidean_distance(r.reversed.back().gamma, fwd.front().gamma) < 1e-3);
    CHECK(r.divergence.size() == fwd.states.size());
    CHECK(r.divergence.front() == 0.0);
  }
  SUBCASE("zero tangent gives identical constant curves") {
    const IntegratorConfig cfg = frozen_iid(1.0);
    const GeodesicCurve fwd = integrate({1, 2, 0.1}, {0, 0, 0}, cfg);
    const ReversalResult r = reverse_run(fwd, cfg);
    for (double d : r.divergence) CHECK(d == 0.0);
  }
  SUBCASE("diverged curves are rejected") {
    IntegratorConfig cfg = frozen_iid(1.0);
    cfg.n = 5;
    const GeodesicCurve bad = integrate({0, 0.05, 0}, {0, -10.0, 0}, cfg);
    REQUIRE(bad.diverged_at.has_value());
    CHECK_THROWS_AS(reverse_run(bad, cfg), InvalidInputError);
  }
  SUBCASE("mcmc mode emits a divergence series") {
    const IntegratorConfig cfg = small_mcmc(3);
    const GeodesicCurve fwd = integrate({0, 1, 0}, {0.1, 0.1, 0.2}, cfg);
    REQUIRE_FALSE(fwd.diverged_at);
    const ReversalResult r = reverse_run(fwd, cfg);
    CHECK(r.divergence.size() == r.reversed.states.size());
  }
}

TEST_CASE("riemannian speed is conserved along frozen geodesics") {
  auto drift = [](const std::vector<double>& v) {
    double lo = v.front(), hi = v.front();
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    return (hi - lo) / v.front();
  };
  SUBCASE("lambda = 0: speed in g") {
    IntegratorConfig cfg = frozen_iid(1.0);
    cfg.lambda = 0.0;
    const GeodesicCurve c = integrate({0, 1, 0}, {0.1, 0.1, 0.05}, cfg);
    CHECK(drift(riemannian_speeds(c, *cfg.frozen_stats)) < 0.01);
  }
  SUBCASE("lambda > 0: the flow conserves speed in g + lambda I, not in g") {
    const IntegratorConfig cfg = frozen_iid(1.0);
    const GeodesicCurve c = integrate({0, 1, 0}, {0.1, 0.1, 0.05}, cfg);
    CHECK(drift(riemannian_speeds(c, *cfg.frozen_stats, 8, cfg.lambda)) < 1e-3);
    CHECK(drift(riemannian_speeds(c, *cfg.frozen_stats)) > 0.01);
  }
}

TEST_CASE("euclidean distance") {
  CHECK(euclidean_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(euclidean_distance({0, 1, 0}, {0.921, 1.116, -0.655}) == doctest::Approx(1.137).epsilon(1e-3));
  CHECK(euclidean_distance({5, 10, -1}, {7.238, 12.495, -1.379}) == doctest::Approx(3.373).epsilon(1e-3));
}

TEST_CASE("mcmc run along the beta direction stays in a loose band around the chord") {
  IntegratorConfig cfg;
  cfg.mcmc.seed = 1;
  const GeodesicCurve c = integrate({0, 1, 0}, {0, 0, 0.1}, cfg);
  REQUIRE_FALSE(c.diverged_at);
  const double ed = euclidean_distance(c.front().gamma, c.back().gamma);
  CHECK(c.back().gamma[kBeta] > 0.0);
  CHECK(c.back().gamma[kBeta] < 1.0);
  CHECK(c.distance >= ed);
  CHECK(c.distance <= 2.0 * ed);
}
