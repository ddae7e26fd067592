#include "gmrfgeo/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "gmrfgeo/errors.hpp"

namespace gmrfgeo {
namespace {

constexpr std::array<Offset, 4> kFirstOrder{{{-1, 0}, {0, -1}, {0, 1}, {1, 0}}};
constexpr std::array<Offset, 8> kSecondOrder{
    {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}}};
constexpr std::array<Offset, 12> kThirdOrder{{{-2, 0},
                                              {-1, -1},
                                              {-1, 0},
                                              {-1, 1},
                                              {0, -2},
                                              {0, -1},
                                              {0, 1},
                                              {0, 2},
                                              {1, -1},
                                              {1, 0},
                                              {1, 1},
                                              {2, 0}}};

Eigen::Index wrap(Eigen::Index i, Eigen::Index n) {
  const Eigen::Index m = i % n;
  return m < 0 ? m + n : m;
}

void check_neighbors(std::span<const double> neighbors) {
  if (neighbors.size() != 4 && neighbors.size() != 8 && neighbors.size() != 12) {
    throw InvalidInputError("neighbor list must hold 4, 8 or 12 values, got " +
                            std::to_string(neighbors.size()));
  }
  for (double v : neighbors) {
    if (!std::isfinite(v)) throw InvalidInputError("non-finite neighbor value");
  }
}

// Sum of (x_j - mu) over the neighborhood.
double centered_sum(std::span<const double> neighbors, double mu) {
  double s = 0.0;
  for (double v : neighbors) s += v - mu;
  return s;
}

// Visits every site that owns a full neighborhood, in raster order.
template <class Fn>
void for_each_evaluated_site(const FieldSample& field, NeighborhoodOrder order, Fn&& fn) {
  const int reach = field.boundary == Boundary::toroidal ? 0 : neighborhood_reach(order);
  for (Eigen::Index r = reach; r < field.rows() - reach; ++r) {
    for (Eigen::Index c = reach; c < field.cols() - reach; ++c) fn(r, c);
  }
}

void require_evaluated_sites(const FieldSample& field, NeighborhoodOrder order) {
  field.validate();
  if (evaluated_site_count(field, order) < 1) {
    throw DomainError("lattice too small: no site has a full neighborhood");
  }
}

}  // namespace

void ModelParams::validate() const {
  if (!std::isfinite(mu) || !std::isfinite(sigma2) || !std::isfinite(beta)) {
    throw InvalidInputError("model parameters must be finite");
  }
  if (sigma2 <= 0.0) throw DomainError("sigma2 must be positive, got " + std::to_string(sigma2));
}

int neighbor_count(NeighborhoodOrder order) { return static_cast<int>(neighbor_offsets(order).size()); }

std::span<const Offset> neighbor_offsets(NeighborhoodOrder order) {
  switch (order) {
    case NeighborhoodOrder::first:
      return kFirstOrder;
    case NeighborhoodOrder::second:
      return kSecondOrder;
    case NeighborhoodOrder::third:
      return kThirdOrder;
  }
  return kSecondOrder;
}

int neighborhood_reach(NeighborhoodOrder order) { return order == NeighborhoodOrder::third ? 2 : 1; }

void FieldSample::validate() const {
  if (rows() < 3 || cols() < 3) throw DomainError("field must be at least 3x3");
  if (!values.allFinite()) throw InvalidInputError("field contains non-finite values");
}

void McmcConfig::validate() const {
  if (rows < 16 || cols < 16) throw DomainError("MCMC lattice must be at least 16x16");
  if (burn_in_sweeps < 0) throw InvalidInputError("burn_in_sweeps must be >= 0");
  if (sweeps_per_sample < 1) throw InvalidInputError("sweeps_per_sample must be >= 1");
  if (!(divergence_threshold > 0.0)) throw InvalidInputError("divergence_threshold must be > 0");
}

double NaturalDecomposition::log_likelihood() const {
  double acc = d + s_of_x;
  for (std::size_t k = 0; k < c.size(); ++k) acc += c[k] * sufficient_stats[k];
  return acc;
}

double local_conditional_logpdf(double x, std::span<const double> neighbors, const ModelParams& params) {
  params.validate();
  check_neighbors(neighbors);
  if (!std::isfinite(x)) throw InvalidInputError("non-finite site value");
  const double r = (x - params.mu) - params.beta * centered_sum(neighbors, params.mu);
  return -0.5 * std::log(2.0 * std::numbers::pi * params.sigma2) - r * r / (2.0 * params.sigma2);
}

Vec3 score(double x, std::span<const double> neighbors, const ModelParams& params) {
  params.validate();
  check_neighbors(neighbors);
  if (!std::isfinite(x)) throw InvalidInputError("non-finite site value");
  const double delta = static_cast<double>(neighbors.size());
  const double s = centered_sum(neighbors, params.mu);
  const double r = (x - params.mu) - params.beta * s;
  const double v = params.sigma2;
  return {(1.0 - params.beta * delta) * r / v, -1.0 / (2.0 * v) + r * r / (2.0 * v * v), r * s / v};
}

std::array<double, 12> gather_neighbors(const FieldSample& field, Eigen::Index r, Eigen::Index c,
                                        NeighborhoodOrder order) {
  std::array<double, 12> out{};
  std::size_t k = 0;
  for (const Offset& o : neighbor_offsets(order)) {
    out[k++] = field.values(wrap(r + o.dr, field.rows()), wrap(c + o.dc, field.cols()));
  }
  return out;
}

long evaluated_site_count(const FieldSample& field, NeighborhoodOrder order) {
  if (field.boundary == Boundary::toroidal) return static_cast<long>(field.rows() * field.cols());
  const int reach = neighborhood_reach(order);
  const long h = static_cast<long>(field.rows()) - 2 * reach;
  const long w = static_cast<long>(field.cols()) - 2 * reach;
  return h > 0 && w > 0 ? h * w : 0;
}

double pseudo_log_likelihood(const FieldSample& field, const ModelParams& params, NeighborhoodOrder order) {
  params.validate();
  require_evaluated_sites(field, order);
  const auto delta = static_cast<std::size_t>(neighbor_count(order));
  double total = 0.0;
  for_each_evaluated_site(field, order, [&](Eigen::Index r, Eigen::Index c) {
    const auto nb = gather_neighbors(field, r, c, order);
    total += local_conditional_logpdf(field.values(r, c), std::span<const double>(nb.data(), delta), params);
  });
  return total;
}

NaturalDecomposition natural_decomposition(const FieldSample& field, const ModelParams& params,
                                           NeighborhoodOrder order) {
  params.validate();
  require_evaluated_sites(field, order);
  const auto delta_n = static_cast<std::size_t>(neighbor_count(order));
  const double delta = static_cast<double>(delta_n);

  NaturalDecomposition out;
  auto& t = out.sufficient_stats;
  for_each_evaluated_site(field, order, [&](Eigen::Index r, Eigen::Index c) {
    const auto nb = gather_neighbors(field, r, c, order);
    double s = 0.0;
    for (std::size_t k = 0; k < delta_n; ++k) s += nb[k];
    const double x = field.values(r, c);
    t[0] += x;
    t[1] += x * x;
    t[2] += x * s;
    t[3] += s;
    t[4] += s * s;
    ++out.n_sites;
  });

  const double mu = params.mu;
  const double v = params.sigma2;
  const double b = params.beta;
  const double shrink = 1.0 - b * delta;
  const double n = static_cast<double>(out.n_sites);
  // The last coefficient multiplies sum_i (sum_j x_j)^2 and is quadratic in beta.
  out.c = {mu * shrink / v, -1.0 / (2.0 * v), b / v, -b * mu * shrink / v, -b * b / (2.0 * v)};
  out.d = -0.5 * n * (std::log(2.0 * std::numbers::pi * v) + mu * mu / v) +
          b * delta * mu * mu * n / v * (1.0 - b * delta / 2.0);
  out.s_of_x = 0.0;
  return out;
}

FieldSample sample_field(const ModelParams& params, NeighborhoodOrder order, const McmcConfig& cfg,
                         std::optional<FieldSample> initial) {
  params.validate();
  cfg.validate();

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double sd = std::sqrt(params.sigma2);

  FieldSample field;
  int sweeps = cfg.sweeps_per_sample;
  if (initial) {
    field = std::move(*initial);
    field.validate();
  } else {
    field.boundary = cfg.boundary;
    field.values.resize(cfg.rows, cfg.cols);
    for (Eigen::Index r = 0; r < cfg.rows; ++r)
      for (Eigen::Index c = 0; c < cfg.cols; ++c) field.values(r, c) = params.mu + sd * normal(rng);
    sweeps = cfg.burn_in_sweeps;
  }

  const Eigen::Index rows = field.rows();
  const Eigen::Index cols = field.cols();
  const bool torus = field.boundary == Boundary::toroidal;
  const auto offsets = neighbor_offsets(order);
  const double limit = cfg.divergence_threshold * sd;
  const double inv2v = 1.0 / (2.0 * params.sigma2);

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double worst = 0.0;
    bool non_finite = false;
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        double s = 0.0;
        for (const Offset& o : offsets) {
          Eigen::Index rr = r + o.dr;
          Eigen::Index cc = c + o.dc;
          if (torus) {
            rr = wrap(rr, rows);
            cc = wrap(cc, cols);
          } else if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) {
            continue;  // free boundary
          }
          s += field.values(rr, cc) - params.mu;
        }
        const double mean = params.mu + params.beta * s;
        double& x = field.values(r, c);
        if (cfg.kernel == SamplerKernel::gibbs) {
          x = mean + sd * normal(rng);
        } else {
          const double y = params.mu + sd * normal(rng);
          double log_ratio = ((x - mean) * (x - mean) - (y - mean) * (y - mean)) * inv2v;
          if (cfg.kernel == SamplerKernel::metropolis) {
            log_ratio += ((y - params.mu) * (y - params.mu) - (x - params.mu) * (x - params.mu)) * inv2v;
          }
          if (log_ratio >= 0.0 || uniform(rng) < std::exp(log_ratio)) x = y;
        }
        if (!std::isfinite(x)) non_finite = true;
        else worst = std::max(worst, std::abs(x - params.mu));
      }
    }
    if (non_finite || worst > limit) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "MCMC divergence after sweep %d: max |x - mu| = %.6g exceeds %.6g",
                    sweep + 1, worst, limit);
      throw DivergenceError(buf);
    }
  }
  return field;
}

void write_field_csv(std::ostream& os, const FieldSample& field) {
  char buf[32];
  for (Eigen::Index r = 0; r < field.rows(); ++r) {
    for (Eigen::Index c = 0; c < field.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", field.values(r, c));
      if (c > 0) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace gmrfgeo
