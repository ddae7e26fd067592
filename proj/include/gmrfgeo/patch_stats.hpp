#pragma once

// Second-order (3x3) patch statistics: the 9x9 patch covariance and its split
// into the central-row covariances rho and the neighbor block Sigma_minus.
// Flattening is row-major, so the center of a patch sits at flat index 4.

#include <span>

#include <Eigen/Dense>

#include "gmrfgeo/sampler.hpp"

namespace gmrfgeo {

using PatchMatrix = Eigen::Matrix<double, Eigen::Dynamic, 9, Eigen::RowMajor>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Vec8 = Eigen::Matrix<double, 8, 1>;

inline constexpr int kPatchCenter = 4;

struct PatchStats {
  Mat9 sigma_p = Mat9::Zero();
  Vec8 rho = Vec8::Zero();
  Mat8 sigma_minus = Mat8::Zero();
  long n_patches = 0;
};

struct PatchDecomposition {
  Vec8 rho;
  Mat8 sigma_minus;
};

/// One row per center site. Toroidal fields give rows*cols patches,
/// interior-only fields (rows-2)*(cols-2).
PatchMatrix extract_patches(const FieldSample& field);

/// Maximum-likelihood covariance (divisor n) of the patch vectors around
/// their per-coordinate sample mean. Needs at least two patches.
Mat9 patch_covariance(const PatchMatrix& patches);

PatchDecomposition decompose(const Mat9& sigma_p);

/// Inverse of decompose: puts rho and sigma_minus back around `center_variance`.
Mat9 reassemble(const PatchDecomposition& parts, double center_variance);

/// Sum of all entries (the ||.||_+ functional).
template <class Derived>
double sum_all(const Eigen::DenseBase<Derived>& a) {
  return a.sum();
}

/// ||a (x) b||_+. Every entry of the Kronecker product is a_i * b_j, so the
/// total factorises into sum_all(a) * sum_all(b).
template <class A, class B>
double kron_sum(const Eigen::DenseBase<A>& a, const Eigen::DenseBase<B>& b) {
  return sum_all(a) * sum_all(b);
}

PatchStats patch_stats(const FieldSample& field);

/// Covariance over the patches of several fields taken together.
PatchStats pooled_patch_stats(std::span<const FieldSample> fields);

/// Exact statistics of an i.i.d. N(mu, sigma2) field: Sigma_p = sigma2 * I,
/// rho = 0, Sigma_minus = sigma2 * I.
PatchStats independence_stats(double sigma2);

/// Builds stats from given rho / Sigma_minus (center variance defaults to 1).
PatchStats stats_from_parts(const Vec8& rho, const Mat8& sigma_minus, double center_variance = 1.0);

}  // namespace gmrfgeo
