#include "gmrfgeo/fisher_metric.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "gmrfgeo/errors.hpp"

namespace gmrfgeo {
namespace {

void set_sym(Mat3& m, int i, int j, double v) {
  m(i, j) = v;
  m(j, i) = v;
}

}  // namespace

const Mat3& MetricDerivatives::along(int coord) const {
  if (coord == kSigma2) return d_sigma2;
  if (coord == kBeta) return d_beta;
  throw InvalidInputError("metric derivatives are stored for sigma2 and beta only");
}

StatSums StatSums::from(const PatchStats& stats) {
  StatSums s;
  s.rho = sum_all(stats.rho);
  s.sm = sum_all(stats.sigma_minus);
  s.rho_rho = kron_sum(stats.rho, stats.rho);
  s.rho_sm = kron_sum(stats.rho, stats.sigma_minus);
  s.sm_sm = kron_sum(stats.sigma_minus, stats.sigma_minus);
  return s;
}

MetricTensor metric_tensor(const ModelParams& params, const PatchStats& stats, int delta) {
  params.validate();
  const StatSums k = StatSums::from(stats);
  const double v = params.sigma2;
  const double b = params.beta;
  const double shrink = 1.0 - b * delta;
  const double v2 = v * v;
  const double v3 = v2 * v;
  const double v4 = v3 * v;

  const double lin = 2.0 * b * k.rho - b * b * k.sm;
  const double quad22 = 3.0 * b * b * k.rho_rho - 3.0 * b * b * b * k.rho_sm + 3.0 * b * b * b * b * k.sm_sm;
  const double quad23 = 6.0 * b * k.rho_rho - 9.0 * b * b * k.rho_sm + 3.0 * b * b * b * k.sm_sm;
  const double quad33 = 2.0 * k.rho_rho - 6.0 * b * k.rho_sm + 3.0 * b * b * k.sm_sm;

  MetricTensor out;
  out.g(kMu, kMu) = shrink * shrink / v * (1.0 - lin / v);
  out.g(kSigma2, kSigma2) = 1.0 / (2.0 * v2) - lin / v3 + quad22 / v4;
  set_sym(out.g, kSigma2, kBeta, (k.rho - b * k.sm) / v2 - quad23 / (2.0 * v3));
  out.g(kBeta, kBeta) = k.sm / v + quad33 / v2;
  return out;
}

InverseMetric inverse_metric(const MetricTensor& metric, double lambda) {
  const Mat3& g = metric.g;
  const double g11 = g(kMu, kMu) + lambda;
  const double g22 = g(kSigma2, kSigma2) + lambda;
  const double g33 = g(kBeta, kBeta) + lambda;
  const double g23 = g(kSigma2, kBeta);
  const double det = g22 * g33 - g23 * g23;

  if (g11 == 0.0 || !std::isfinite(g11)) {
    throw NumericalError("regularized metric is singular: g11 + lambda = " + std::to_string(g11), g11 * det);
  }
  if (det == 0.0 || !std::isfinite(det)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "regularized metric is singular: det of (sigma2, beta) block = %.6g", det);
    throw NumericalError(buf, g11 * det);
  }

  InverseMetric inv;
  inv.lambda = lambda;
  inv.g_inv(kMu, kMu) = 1.0 / g11;
  inv.g_inv(kSigma2, kSigma2) = g33 / det;
  set_sym(inv.g_inv, kSigma2, kBeta, g23 / (g23 * g23 - g22 * g33));
  inv.g_inv(kBeta, kBeta) = g22 / det;
  return inv;
}

MetricDerivatives metric_derivatives(const ModelParams& params, const PatchStats& stats, int delta,
                                     Dg33BetaForm form) {
  params.validate();
  const StatSums k = StatSums::from(stats);
  const double v = params.sigma2;
  const double b = params.beta;
  const double dl = static_cast<double>(delta);
  const double shrink = 1.0 - b * dl;
  const double v2 = v * v;
  const double v3 = v2 * v;
  const double v4 = v3 * v;
  const double v5 = v4 * v;

  const double lin = 2.0 * b * k.rho - b * b * k.sm;
  const double lin_db = 2.0 * k.rho - 2.0 * b * k.sm;
  const double quad22 = 3.0 * b * b * k.rho_rho - 3.0 * b * b * b * k.rho_sm + 3.0 * b * b * b * b * k.sm_sm;
  const double quad23 = 6.0 * b * k.rho_rho - 9.0 * b * b * k.rho_sm + 3.0 * b * b * b * k.sm_sm;
  const double quad33 = 2.0 * k.rho_rho - 6.0 * b * k.rho_sm + 3.0 * b * b * k.sm_sm;

  MetricDerivatives d;
  Mat3& ds = d.d_sigma2;
  ds(kMu, kMu) = -shrink * shrink / v2 + 2.0 * shrink * shrink * lin / v3;
  ds(kSigma2, kSigma2) = -1.0 / v3 + 3.0 * lin / v4 - 4.0 * quad22 / v5;
  set_sym(ds, kSigma2, kBeta, -2.0 * (k.rho - b * k.sm) / v3 + 3.0 * quad23 / (2.0 * v4));
  ds(kBeta, kBeta) = -k.sm / v2 - 2.0 * quad33 / v3;

  Mat3& db = d.d_beta;
  db(kMu, kMu) = -2.0 * dl * shrink / v * (1.0 - lin / v) - shrink * shrink * lin_db / v2;
  db(kSigma2, kSigma2) =
      -lin_db / v3 + (6.0 * b * k.rho_rho - 9.0 * b * b * k.rho_sm + 12.0 * b * b * b * k.sm_sm) / v4;
  set_sym(db, kSigma2, kBeta,
          -k.sm / v2 - (6.0 * k.rho_rho - 18.0 * b * k.rho_sm + 9.0 * b * b * k.sm_sm) / (2.0 * v3));
  const double rho_sm_coeff = form == Dg33BetaForm::calculus ? 1.0 : b;
  db(kBeta, kBeta) = (-6.0 * rho_sm_coeff * k.rho_sm + 6.0 * b * k.sm_sm) / v2;
  return d;
}

EntropyValue entropy(const ModelParams& params, const PatchStats& stats) {
  params.validate();
  const double v = params.sigma2;
  const double b = params.beta;
  EntropyValue e;
  e.h_gauss = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * v);
  e.h_beta = e.h_gauss - (b * sum_all(stats.rho) - 0.5 * b * b * sum_all(stats.sigma_minus)) / v;
  return e;
}

}  // namespace gmrfgeo
