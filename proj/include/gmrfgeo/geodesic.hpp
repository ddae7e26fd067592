#pragma once

// Geodesic integration on the GMRF manifold. The second-order geodesic
// equations are written as the first-order system
//   gamma' = alpha,   alpha_k' = -alpha^T Gamma^k alpha
// and advanced with classical RK4. Distance accumulates the coordinate norm
// ||alpha|| * h per step.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gmrfgeo/christoffel.hpp"
#include "gmrfgeo/fisher_metric.hpp"
#include "gmrfgeo/patch_stats.hpp"
#include "gmrfgeo/sampler.hpp"
#include "gmrfgeo/types.hpp"

namespace gmrfgeo {

struct GeodesicState {
  double t = 0.0;
  Vec3 gamma = Vec3::Zero();  // (mu, sigma2, beta)
  Vec3 alpha = Vec3::Zero();  // tangent
};

using StateVector = Eigen::Matrix<double, 6, 1>;

/// Where patch statistics come from during integration.
///  mcmc:   a field is generated at the current position every iteration.
///  frozen: statistics are fixed for the whole run (supplied, or sampled once
///          at the start point); the right-hand side is deterministic.
enum class CovarianceMode { mcmc, frozen };

/// How often the Christoffel symbols are evaluated inside one RK4 step.
///  per_iteration: once, at the start of the step, and held over all four stages.
///  per_stage:     at every stage position (self-consistent RK4).
///  automatic:     per_iteration in mcmc mode, per_stage in frozen mode.
enum class ChristoffelUpdate { automatic, per_iteration, per_stage };

/// Sampler defaults used while integrating: the bounded `uncorrected` kernel,
/// since trajectories routinely cross |beta| * 8 >= 1.
McmcConfig default_geodesic_mcmc();

struct IntegratorConfig {
  double a = 0.0;
  double b = 5.0;
  int n = 200;
  double lambda = 0.01;
  CovarianceMode mode = CovarianceMode::mcmc;
  McmcConfig mcmc = default_geodesic_mcmc();
  bool warm_start = true;
  double alpha_magnitude_warn = 0.5;
  std::optional<PatchStats> frozen_stats;
  ChristoffelUpdate update = ChristoffelUpdate::automatic;
  Dg33BetaForm dg33_form = Dg33BetaForm::calculus;
  int delta = 8;

  double h() const { return (b - a) / n; }
  void validate() const;
  ChristoffelUpdate resolved_update() const;
};

struct GeodesicCurve {
  std::vector<GeodesicState> states;
  double distance = 0.0;           // sum ||alpha_i|| h
  double riemannian_length = 0.0;  // sum sqrt(alpha_i^T g alpha_i) h, diagnostic
  std::optional<int> diverged_at;  // iteration index where integration stopped
  std::string divergence_reason;
  std::uint64_t seed = 0;
  std::optional<PatchStats> frozen_stats;  // the statistics used in frozen mode
  std::vector<std::string> warnings;

  const GeodesicState& front() const { return states.front(); }
  const GeodesicState& back() const { return states.back(); }
};

struct ReversalResult {
  GeodesicCurve reversed;
  /// ||gamma_rev(t_k) - gamma_fwd(b - t_k)|| for every k both curves reached.
  std::vector<double> divergence;
};

/// Christoffel symbols at theta from fixed statistics.
ChristoffelTensor christoffel_at(const Vec3& theta, const PatchStats& stats, double lambda, int delta = 8,
                                 Dg33BetaForm form = Dg33BetaForm::calculus);

StateVector geodesic_rhs(const GeodesicState& state, const ChristoffelTensor& christoffel);

/// One classical RK4 step with Gamma held fixed across the four stages.
/// Throws DivergenceError on a non-finite result.
GeodesicState rk4_step(const GeodesicState& state, const ChristoffelTensor& christoffel, double h);

/// One classical RK4 step with Gamma re-evaluated at every stage position.
GeodesicState rk4_step(const GeodesicState& state,
                       const std::function<ChristoffelTensor(const Vec3&)>& christoffel_field, double h);

GeodesicCurve integrate(const Vec3& start_gamma, const Vec3& start_alpha, const IntegratorConfig& cfg);

double euclidean_distance(const Vec3& p, const Vec3& q);

/// Restarts from the final state with the tangent negated, under `cfg`. In
/// frozen mode the forward run's statistics are reused.
ReversalResult reverse_run(const GeodesicCurve& forward, const IntegratorConfig& cfg);

/// sqrt(alpha^T (g + lambda I) alpha) at every state, with g from fixed
/// statistics. The integrator's flow conserves this quantity for the lambda it
/// was run with, since the regularization does not change the derivatives.
std::vector<double> riemannian_speeds(const GeodesicCurve& curve, const PatchStats& stats, int delta = 8,
                                      double lambda = 0.0);

}  // namespace gmrfgeo
