#pragma once

// Closed-form first-order Fisher information of the GMRF manifold in the
// Kronecker-sum notation, its regularized inverse, its derivatives in sigma2
// and beta, and the conditional entropy.

#include "gmrfgeo/patch_stats.hpp"
#include "gmrfgeo/sampler.hpp"
#include "gmrfgeo/types.hpp"

namespace gmrfgeo {

/// g with g(0,1) = g(0,2) = 0 held structurally.
struct MetricTensor {
  Mat3 g = Mat3::Zero();
};

struct InverseMetric {
  Mat3 g_inv = Mat3::Zero();
  double lambda = 0.0;
};

/// dg/dmu is identically zero and not stored.
struct MetricDerivatives {
  Mat3 d_sigma2 = Mat3::Zero();
  Mat3 d_beta = Mat3::Zero();

  const Mat3& along(int coord) const;  // coord = kSigma2 or kBeta
};

/// Which expression to use for d g33 / d beta. `extra_beta_cross_term`
/// multiplies the rho (x) Sigma_minus term by beta; it does not match the
/// derivative of g33 and exists only to demonstrate the mismatch.
enum class Dg33BetaForm { calculus, extra_beta_cross_term };

struct EntropyValue {
  double h_beta = 0.0;
  double h_gauss = 0.0;
};

/// The Kronecker sums the metric depends on.
struct StatSums {
  double rho = 0.0;          // ||rho||+
  double sm = 0.0;           // ||Sigma_minus||+
  double rho_rho = 0.0;      // ||rho (x) rho||+
  double rho_sm = 0.0;       // ||rho (x) Sigma_minus||+
  double sm_sm = 0.0;        // ||Sigma_minus (x) Sigma_minus||+

  static StatSums from(const PatchStats& stats);
};

MetricTensor metric_tensor(const ModelParams& params, const PatchStats& stats, int delta = 8);

/// Block inverse of g + lambda*I. Throws NumericalError when g11 + lambda or
/// the determinant of the (sigma2, beta) block vanishes or is non-finite.
InverseMetric inverse_metric(const MetricTensor& g, double lambda = 0.01);

MetricDerivatives metric_derivatives(const ModelParams& params, const PatchStats& stats, int delta = 8,
                                     Dg33BetaForm form = Dg33BetaForm::calculus);

EntropyValue entropy(const ModelParams& params, const PatchStats& stats);

}  // namespace gmrfgeo
