#include "gmrfgeo/validation.hpp"

#include <algorithm>
#include <cmath>

#include "gmrfgeo/errors.hpp"

namespace gmrfgeo {
namespace {

// Mean of score * score^T over the evaluated sites of one field, in fixed
// raster order.
Mat3 field_outer_mean(const FieldSample& field, const ModelParams& params, NeighborhoodOrder order) {
  const auto delta = static_cast<std::size_t>(neighbor_count(order));
  const Eigen::Index reach = field.boundary == Boundary::toroidal ? 0 : neighborhood_reach(order);
  Mat3 acc = Mat3::Zero();
  long count = 0;
  for (Eigen::Index r = reach; r < field.rows() - reach; ++r) {
    for (Eigen::Index c = reach; c < field.cols() - reach; ++c) {
      const auto nb = gather_neighbors(field, r, c, order);
      const Vec3 s = score(field.values(r, c), std::span<const double>(nb.data(), delta), params);
      acc.noalias() += s * s.transpose();
      ++count;
    }
  }
  if (count == 0) throw DomainError("lattice too small: no site has a full neighborhood");
  return acc / static_cast<double>(count);
}

double rel_error(double estimate, double reference, double floor) {
  return std::abs(estimate - reference) / std::max(std::abs(reference), floor);
}

// Fills the summary fields of a finite-difference report (estimate = FD,
// reference = closed form).
void summarize_fd(OracleReport& rep) {
  const double floor = std::max(1e-3 * rep.reference.cwiseAbs().maxCoeff(), 1e-300);
  rep.max_rel_error_diag = 0.0;
  rep.max_abs_error_offdiag = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double e = rel_error(rep.estimate(i, j), rep.reference(i, j), floor);
      if (i == j) {
        rep.max_rel_error_diag = std::max(rep.max_rel_error_diag, e);
      } else {
        rep.max_abs_error_offdiag = std::max(rep.max_abs_error_offdiag, e);
      }
    }
  }
}

}  // namespace

OracleReport mc_fisher(const ModelParams& params, NeighborhoodOrder order, const McmcConfig& cfg, int n_fields,
                       FisherOracleTolerance tol) {
  if (n_fields < 1) throw InvalidInputError("n_fields must be >= 1");
  params.validate();
  cfg.validate();

  std::vector<FieldSample> fields;
  std::vector<Mat3> means;
  fields.reserve(static_cast<std::size_t>(n_fields));
  means.reserve(static_cast<std::size_t>(n_fields));
  for (int f = 0; f < n_fields; ++f) {
    McmcConfig fc = cfg;
    fc.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(f));
    fields.push_back(sample_field(params, order, fc));
    means.push_back(field_outer_mean(fields.back(), params, order));
  }

  OracleReport rep;
  for (const Mat3& m : means) rep.estimate += m;
  rep.estimate /= static_cast<double>(n_fields);
  rep.estimate = 0.5 * (rep.estimate + rep.estimate.transpose()).eval();
  if (n_fields > 1) {
    Mat3 var = Mat3::Zero();
    for (const Mat3& m : means) var += (m - rep.estimate).cwiseAbs2();
    var /= static_cast<double>(n_fields - 1);
    rep.std_error = (var / static_cast<double>(n_fields)).cwiseSqrt();
  }
  rep.n_samples = static_cast<long>(n_fields) * evaluated_site_count(fields.front(), order);
  rep.reference = metric_tensor(params, pooled_patch_stats(fields), neighbor_count(order)).g;

  for (int i = 0; i < 3; ++i) {
    rep.max_rel_error_diag =
        std::max(rep.max_rel_error_diag, rel_error(rep.estimate(i, i), rep.reference(i, i), 1e-300));
  }
  for (int j : {kSigma2, kBeta}) {
    const double err = std::abs(rep.estimate(kMu, j) - rep.reference(kMu, j));
    rep.max_abs_error_offdiag = std::max(rep.max_abs_error_offdiag, err);
    const double se = rep.std_error(kMu, j);
    rep.max_offdiag_z = std::max(rep.max_offdiag_z, se > 0.0 ? err / se : (err == 0.0 ? 0.0 : HUGE_VAL));
  }
  rep.passed = rep.max_rel_error_diag <= tol.diag_rel && rep.max_offdiag_z <= tol.offdiag_z;
  return rep;
}

DerivativeOracleReport fd_metric_derivatives(const ModelParams& params, const PatchStats& stats, int delta,
                                             double step, Dg33BetaForm form, double tolerance) {
  if (!(step > 0.0)) throw InvalidInputError("finite-difference step must be positive");
  if (!(params.sigma2 - step > 0.0)) throw DomainError("sigma2 - step must stay positive");
  params.validate();

  auto g_at = [&](double mu, double sigma2, double beta) {
    return metric_tensor({mu, sigma2, beta}, stats, delta).g;
  };
  const double m = params.mu;
  const double s = params.sigma2;
  const double b = params.beta;
  const MetricDerivatives closed = metric_derivatives(params, stats, delta, form);

  DerivativeOracleReport rep;
  rep.tolerance = tolerance;
  rep.sigma2.estimate = (g_at(m, s + step, b) - g_at(m, s - step, b)) / (2.0 * step);
  rep.sigma2.reference = closed.d_sigma2;
  rep.beta.estimate = (g_at(m, s, b + step) - g_at(m, s, b - step)) / (2.0 * step);
  rep.beta.reference = closed.d_beta;
  rep.mu_slope_max = ((g_at(m + step, s, b) - g_at(m - step, s, b)) / (2.0 * step)).cwiseAbs().maxCoeff();

  for (OracleReport* r : {&rep.sigma2, &rep.beta}) {
    summarize_fd(*r);
    r->n_samples = 1;
    r->passed = std::max(r->max_rel_error_diag, r->max_abs_error_offdiag) <= tolerance;
    rep.max_rel_error = std::max({rep.max_rel_error, r->max_rel_error_diag, r->max_abs_error_offdiag});
  }
  rep.passed = rep.sigma2.passed && rep.beta.passed && rep.mu_slope_max < 1e-8;
  return rep;
}

ScoreCheckReport fd_score_check(const ModelParams& params, std::span<const ScoreSample> samples, double step,
                                double tolerance) {
  if (!(step > 0.0)) throw InvalidInputError("finite-difference step must be positive");
  if (!(params.sigma2 - step > 0.0)) throw DomainError("sigma2 - step must stay positive");
  params.validate();

  ScoreCheckReport rep;
  for (const ScoreSample& smp : samples) {
    const Vec3 analytic = score(smp.x, smp.neighbors, params);
    const Vec3 theta = params.as_vector();
    for (int k = 0; k < 3; ++k) {
      Vec3 up = theta;
      Vec3 dn = theta;
      up[k] += step;
      dn[k] -= step;
      const double fd = (local_conditional_logpdf(smp.x, smp.neighbors, ModelParams::from_vector(up)) -
                         local_conditional_logpdf(smp.x, smp.neighbors, ModelParams::from_vector(dn))) /
                        (2.0 * step);
      rep.max_rel_error = std::max(rep.max_rel_error, rel_error(fd, analytic[k], 1.0));
    }
    ++rep.n_samples;
  }
  rep.passed = rep.max_rel_error <= tolerance;
  return rep;
}

}  // namespace gmrfgeo
