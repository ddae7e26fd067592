#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the closed forms under test except where a function's contract
// is explicitly "evaluate the library at shifted points" (finite differences).

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "gmrfgeo/christoffel.hpp"
#include "gmrfgeo/fisher_metric.hpp"
#include "gmrfgeo/patch_stats.hpp"
#include "gmrfgeo/sampler.hpp"

namespace oracle {

using gmrfgeo::Mat3;
using gmrfgeo::Vec3;

inline double gaussian_logpdf(double x, double mean, double var) {
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - (x - mean) * (x - mean) / (2.0 * var);
}

/// Sum of all entries of the explicit Kronecker product.
template <class A, class B>
double explicit_kron_sum(const A& a, const B& b) {
  const Eigen::MatrixXd ka = a;
  const Eigen::MatrixXd kb = b;
  const Eigen::MatrixXd k = Eigen::kroneckerProduct(ka, kb).eval();
  return k.sum();
}

/// General-purpose inverse of g + lambda I.
inline Mat3 general_inverse(const Mat3& g, double lambda) { return (g + lambda * Mat3::Identity()).inverse(); }

/// Composite trapezoid rule on [lo, hi].
inline double trapezoid(const std::function<double(double)>& f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double acc = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < n; ++i) acc += f(lo + i * h);
  return acc * h;
}

/// Patch covariance by explicit loops over 3x3 windows (toroidal or interior),
/// per-coordinate sample mean, divisor n.
inline Eigen::Matrix<double, 9, 9> brute_patch_covariance(const gmrfgeo::FieldSample& f) {
  const long R = f.rows();
  const long C = f.cols();
  const bool torus = f.boundary == gmrfgeo::Boundary::toroidal;
  std::vector<std::array<double, 9>> patches;
  for (long r = torus ? 0 : 1; r < (torus ? R : R - 1); ++r) {
    for (long c = torus ? 0 : 1; c < (torus ? C : C - 1); ++c) {
      std::array<double, 9> p{};
      int k = 0;
      for (long dr = -1; dr <= 1; ++dr)
        for (long dc = -1; dc <= 1; ++dc) p[k++] = f.values(((r + dr) % R + R) % R, ((c + dc) % C + C) % C);
      patches.push_back(p);
    }
  }
  const double n = static_cast<double>(patches.size());
  std::array<double, 9> mean{};
  for (const auto& p : patches)
    for (int i = 0; i < 9; ++i) mean[i] += p[i] / n;
  Eigen::Matrix<double, 9, 9> cov = Eigen::Matrix<double, 9, 9>::Zero();
  for (const auto& p : patches)
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) cov(i, j) += (p[i] - mean[i]) * (p[j] - mean[j]) / n;
  return cov;
}

/// Central finite-difference derivative of the metric along coordinate k.
inline Mat3 fd_metric(const Vec3& theta, const gmrfgeo::PatchStats& stats, int k, double step, int delta = 8) {
  Vec3 up = theta;
  Vec3 dn = theta;
  up[k] += step;
  dn[k] -= step;
  const Mat3 gu = gmrfgeo::metric_tensor(gmrfgeo::ModelParams::from_vector(up), stats, delta).g;
  const Mat3 gd = gmrfgeo::metric_tensor(gmrfgeo::ModelParams::from_vector(dn), stats, delta).g;
  return (gu - gd) / (2.0 * step);
}

/// Christoffel symbols from the textbook definition with finite-difference
/// metric derivatives in all three coordinates and a general inverse.
inline gmrfgeo::ChristoffelTensor fd_christoffel(const Vec3& theta, const gmrfgeo::PatchStats& stats, double lambda,
                                                 double step = 1e-5) {
  const std::array<Mat3, 3> d{fd_metric(theta, stats, 0, step), fd_metric(theta, stats, 1, step),
                              fd_metric(theta, stats, 2, step)};
  const Mat3 g = gmrfgeo::metric_tensor(gmrfgeo::ModelParams::from_vector(theta), stats).g;
  const Mat3 gi = general_inverse(g, lambda);
  gmrfgeo::ChristoffelTensor out;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (int m = 0; m < 3; ++m) acc += 0.5 * gi(k, m) * (d[i](j, m) + d[j](i, m) - d[m](i, j));
        out[k](i, j) = acc;
      }
  return out;
}

/// Random but well-conditioned patch statistics: the covariance of a random
/// 9-dimensional Gaussian with unit-ish scale.
inline gmrfgeo::PatchStats random_stats(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n01;
  Eigen::Matrix<double, 9, 9> a;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) a(i, j) = n01(rng);
  Eigen::Matrix<double, 9, 9> cov = scale * (a * a.transpose() / 9.0 + 0.2 * Eigen::Matrix<double, 9, 9>::Identity());
  const auto parts = gmrfgeo::decompose(cov);
  return gmrfgeo::stats_from_parts(parts.rho, parts.sigma_minus, cov(4, 4));
}

inline Vec3 random_theta(std::mt19937_64& rng, double beta_range = 0.3) {
  std::uniform_real_distribution<double> mu(-5.0, 5.0);
  std::uniform_real_distribution<double> s2(0.5, 5.0);
  std::uniform_real_distribution<double> b(-beta_range, beta_range);
  return {mu(rng), s2(rng), b(rng)};
}

inline double max_rel(const Mat3& a, const Mat3& b) {
  const double floor = std::max(1e-3 * b.cwiseAbs().maxCoeff(), 1e-300);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / std::max(std::abs(b(i, j)), floor));
  return worst;
}

}  // namespace oracle
