#pragma once

// Brute-force checks of the closed forms: a Monte-Carlo Fisher information
// estimate from sampled score vectors, and finite-difference oracles for the
// metric derivatives and the score.

#include <span>
#include <vector>

#include "gmrfgeo/fisher_metric.hpp"
#include "gmrfgeo/patch_stats.hpp"
#include "gmrfgeo/sampler.hpp"
#include "gmrfgeo/types.hpp"

namespace gmrfgeo {

struct OracleReport {
  Mat3 estimate = Mat3::Zero();
  Mat3 reference = Mat3::Zero();
  Mat3 std_error = Mat3::Zero();  // per-entry standard error of `estimate` (MC only)
  double max_rel_error_diag = 0.0;
  double max_abs_error_offdiag = 0.0;
  double max_offdiag_z = 0.0;  // max |estimate_1j| / std_error_1j over the structural zeros
  long n_samples = 0;
  bool passed = false;
};

struct FisherOracleTolerance {
  double diag_rel = 0.10;
  double offdiag_z = 3.0;
};

/// Samples n_fields independent cold-start fields (seeds derived from cfg.seed
/// and the field index), averages the outer product of the pseudo-likelihood
/// score over every evaluated site, and compares with metric_tensor evaluated
/// on the statistics pooled across all fields. Standard errors come from the
/// spread of the per-field means. Sampler divergence propagates.
OracleReport mc_fisher(const ModelParams& params, NeighborhoodOrder order, const McmcConfig& cfg, int n_fields,
                       FisherOracleTolerance tol = {});

struct DerivativeOracleReport {
  OracleReport sigma2;  // estimate: finite differences, reference: closed form
  OracleReport beta;
  double mu_slope_max = 0.0;  // max |dg/dmu| by finite differences
  double max_rel_error = 0.0;
  double tolerance = 1e-5;
  bool passed = false;
};

/// Central finite differences of metric_tensor in sigma2, beta and mu with the
/// statistics held fixed, compared entrywise against metric_derivatives in the
/// requested form. Relative errors use max(|closed form|, 1e-3 * max entry) as
/// the denominator so that exact zeros do not blow up the ratio.
DerivativeOracleReport fd_metric_derivatives(const ModelParams& params, const PatchStats& stats, int delta,
                                             double step, Dg33BetaForm form = Dg33BetaForm::calculus,
                                             double tolerance = 1e-5);

struct ScoreSample {
  double x = 0.0;
  std::vector<double> neighbors;
};

struct ScoreCheckReport {
  double max_rel_error = 0.0;  // |fd - analytic| / max(|analytic|, 1)
  long n_samples = 0;
  bool passed = false;
};

/// Central differences of local_conditional_logpdf against score for every sample.
ScoreCheckReport fd_score_check(const ModelParams& params, std::span<const ScoreSample> samples, double step,
                                double tolerance = 1e-6);

}  // namespace gmrfgeo
