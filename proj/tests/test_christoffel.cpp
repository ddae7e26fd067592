#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gmrfgeo/christoffel.hpp"
#include "oracles.hpp"

using namespace gmrfgeo;

namespace {

ChristoffelTensor at(const Vec3& th, const PatchStats& st, double lambda,
                     ChristoffelTensor (*fn)(const InverseMetric&, const MetricDerivatives&)) {
  const ModelParams p = ModelParams::from_vector(th);
  return fn(inverse_metric(metric_tensor(p, st), lambda), metric_derivatives(p, st));
}

}  // namespace

TEST_CASE("independence point values") {
  const ChristoffelTensor c = at({0, 1, 0}, independence_stats(1.0), 0.0, christoffel_specialized);
  CHECK(c[0](0, 1) == doctest::Approx(-0.5));
  CHECK(c[1](0, 0) == doctest::Approx(1.0));
  CHECK(c[2](0, 0) == doctest::Approx(1.0));
  CHECK(c[0](0, 2) == doctest::Approx(-8.0));
  CHECK(c[1](1, 1) == doctest::Approx(-1.0));
  CHECK(c[2](1, 2) == doctest::Approx(-0.5));
  CHECK(c[1](2, 2) == doctest::Approx(-8.0));
  CHECK(c[2](1, 1) == doctest::Approx(0.0));
  CHECK(c[1](1, 2) == doctest::Approx(0.0));
  CHECK(c[2](2, 2) == doctest::Approx(0.0));
}

TEST_CASE("structural zeros and lower-index symmetry") {
  std::mt19937_64 rng(41);
  const int zero_pattern[3][3][3] = {
      {{1, 0, 0}, {0, 1, 1}, {0, 1, 1}},  // Gamma^1: only (1,2), (1,3) nonzero
      {{0, 1, 1}, {1, 0, 0}, {1, 0, 0}},  // Gamma^2: (1,2), (1,3) zero
      {{0, 1, 1}, {1, 0, 0}, {1, 0, 0}},
  };
  for (int t = 0; t < 200; ++t) {
    const ChristoffelTensor c =
        at(oracle::random_theta(rng), oracle::random_stats(rng), 0.01, christoffel_specialized);
    CHECK(count_zero_symbols(c) == 13);
    for (int k = 0; k < 3; ++k) {
      CHECK(c[k] == c[k].transpose());
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (zero_pattern[k][i][j]) CHECK(c[k](i, j) == 0.0);
    }
  }
}

TEST_CASE("specialized and general forms agree") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 100; ++t) {
    const Vec3 th = oracle::random_theta(rng);
    const PatchStats st = oracle::random_stats(rng);
    const ChristoffelTensor a = at(th, st, 0.01, christoffel_specialized);
    const ChristoffelTensor b = at(th, st, 0.01, christoffel_general);
    for (int k = 0; k < 3; ++k) CHECK((a[k] - b[k]).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, a[k].cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("specialized form matches the definition with numerical derivatives") {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 30; ++t) {
    const Vec3 th = oracle::random_theta(rng);
    const PatchStats st = oracle::random_stats(rng);
    const ChristoffelTensor a = at(th, st, 0.01, christoffel_specialized);
    const ChristoffelTensor ref = oracle::fd_christoffel(th, st, 0.01);
    for (int k = 0; k < 3; ++k) {
      const double scale = std::max(1e-3, ref[k].cwiseAbs().maxCoeff());
      CHECK((a[k] - ref[k]).cwiseAbs().maxCoeff() / scale < 1e-5);
    }
  }
}

TEST_CASE("general form: hand-expanded special cases") {
  InverseMetric inv;
  inv.g_inv = Vec3(2.0, 3.0, 5.0).asDiagonal();
  MetricDerivatives zero;
  const ChristoffelTensor z = christoffel_general(inv, zero);
  for (int k = 0; k < 3; ++k) CHECK(z[k].isZero(0.0));

  MetricDerivatives only;
  only.d_sigma2(0, 0) = 0.7;  // d g11 / d sigma2
  const ChristoffelTensor c = christoffel_general(inv, only);
  CHECK(c[0](0, 1) == doctest::Approx(0.5 * 0.7 * 2.0));
  CHECK(c[0](1, 0) == c[0](0, 1));
  CHECK(c[1](0, 0) == doctest::Approx(-0.5 * 0.7 * 3.0));
  int nonzero = 0;
  for (int k = 0; k < 3; ++k) nonzero += static_cast<int>((c[k].array() != 0.0).count());
  CHECK(nonzero == 3);
}
