#pragma once

// Pairwise isotropic Gaussian-Markov random field on a 2-D lattice: local
// conditional density, its score, the pseudo-likelihood with its
// exponential-family decomposition, and MCMC field generation.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "gmrfgeo/types.hpp"

namespace gmrfgeo {

/// A point theta = (mu, sigma2, beta) of the parameter manifold.
struct ModelParams {
  double mu = 0.0;
  double sigma2 = 1.0;
  double beta = 0.0;

  /// Throws InvalidInputError on non-finite fields, DomainError on sigma2 <= 0.
  void validate() const;

  Vec3 as_vector() const { return {mu, sigma2, beta}; }
  static ModelParams from_vector(const Vec3& theta) { return {theta[0], theta[1], theta[2]}; }
};

enum class NeighborhoodOrder { first, second, third };

struct Offset {
  int dr;
  int dc;
};

/// Number of neighbors Delta: 4, 8 or 12.
int neighbor_count(NeighborhoodOrder order);

/// Relative offsets of the neighbors, row-major. For the second order system
/// this is the 3x3 patch without its center, in the same order as the patch
/// vector with index 4 removed.
std::span<const Offset> neighbor_offsets(NeighborhoodOrder order);

/// Largest |dr| or |dc| used by the neighborhood.
int neighborhood_reach(NeighborhoodOrder order);

enum class Boundary { toroidal, interior_only };

using Lattice = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One outcome of the random field.
struct FieldSample {
  Lattice values;
  Boundary boundary = Boundary::toroidal;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  /// Throws DomainError unless both dims >= 3, InvalidInputError on non-finite values.
  void validate() const;
};

/// Site update rule of the MCMC sweep.
///
/// `gibbs` draws x_i from the local conditional N(mu + beta*sum(x_j - mu), sigma2).
/// It is exact for the conditional model, but the chain grows without bound
/// once |beta|*Delta >= 1.
///
/// `metropolis` proposes y ~ N(mu, sigma2) independently of the current value
/// and applies the Hastings correction for that proposal, so the local
/// conditional is left invariant. Beyond |beta|*Delta >= 1 the target is
/// improper; the chain then creeps instead of blowing up, because proposals
/// never leave the neighbourhood of mu.
///
/// `uncorrected` uses the same proposal but accepts with min(1, p(y|eta)/p(x|eta))
/// only. The site-wise stationary law is then the product of proposal and
/// conditional, N((mu + m)/2, sigma2/2) with m the conditional mean, i.e. an
/// effective coupling of beta/2 and half the variance. It is not a sampler of
/// the model, but its values never leave the support of the proposal, so it
/// runs for any beta; geodesic runs use it by default because trajectories
/// routinely reach |beta|*Delta >= 1.
enum class SamplerKernel { gibbs, metropolis, uncorrected };

struct McmcConfig {
  int rows = 64;
  int cols = 64;
  int burn_in_sweeps = 100;    // cold start
  int sweeps_per_sample = 5;   // warm start from a previous field
  std::uint64_t seed = 0;
  double divergence_threshold = 50.0;  // in units of sqrt(sigma2)
  SamplerKernel kernel = SamplerKernel::gibbs;
  Boundary boundary = Boundary::toroidal;

  void validate() const;
};

/// Exponential-family view of the pseudo-likelihood:
/// log PL = c . T + d(theta) + S(X), with S(X) = 0.
struct NaturalDecomposition {
  std::array<double, 5> c{};
  double d = 0.0;
  std::array<double, 5> sufficient_stats{};
  double s_of_x = 0.0;
  long n_sites = 0;

  double log_likelihood() const;
};

double local_conditional_logpdf(double x, std::span<const double> neighbors, const ModelParams& params);

/// Gradient of local_conditional_logpdf w.r.t. (mu, sigma2, beta).
Vec3 score(double x, std::span<const double> neighbors, const ModelParams& params);

/// Neighbor values of site (r, c). Toroidal fields wrap; interior-only fields
/// must be queried at interior sites only.
std::array<double, 12> gather_neighbors(const FieldSample& field, Eigen::Index r, Eigen::Index c,
                                        NeighborhoodOrder order);

/// Number of sites that carry a full neighborhood under the field's boundary mode.
long evaluated_site_count(const FieldSample& field, NeighborhoodOrder order);

double pseudo_log_likelihood(const FieldSample& field, const ModelParams& params, NeighborhoodOrder order);

NaturalDecomposition natural_decomposition(const FieldSample& field, const ModelParams& params,
                                           NeighborhoodOrder order);

/// Runs MCMC sweeps in raster order. Cold start (no `initial`): i.i.d.
/// N(mu, sigma2) initialisation followed by cfg.burn_in_sweeps sweeps. Warm
/// start: cfg.sweeps_per_sample sweeps from `initial`. Deterministic given
/// cfg.seed (std::mt19937_64).
///
/// Throws DivergenceError when a value becomes non-finite or strays more than
/// cfg.divergence_threshold * sqrt(sigma2) from mu.
FieldSample sample_field(const ModelParams& params, NeighborhoodOrder order, const McmcConfig& cfg,
                         std::optional<FieldSample> initial = std::nullopt);

/// Row-major CSV, one lattice row per line, %.17g.
void write_field_csv(std::ostream& os, const FieldSample& field);

}  // namespace gmrfgeo
