#include "gmrfgeo/geodesic.hpp"

#include <cmath>
#include <cstdio>

#include "gmrfgeo/errors.hpp"

namespace gmrfgeo {
namespace {

StateVector pack(const Vec3& gamma, const Vec3& alpha) {
  StateVector s;
  s << gamma, alpha;
  return s;
}

Vec3 acceleration(const Vec3& alpha, const ChristoffelTensor& c) {
  return {-alpha.dot(c[0] * alpha), -alpha.dot(c[1] * alpha), -alpha.dot(c[2] * alpha)};
}

// Classical RK4 on the 6-vector (gamma, alpha); `christoffel_for` returns the
// symbols to use at a given stage position.
template <class ChristoffelFor>
GeodesicState rk4(const GeodesicState& s, ChristoffelFor&& christoffel_for, double h) {
  auto f = [&](const StateVector& y) -> StateVector {
    const Vec3 g = y.head<3>();
    const Vec3 a = y.tail<3>();
    return pack(a, acceleration(a, christoffel_for(g)));
  };
  const StateVector y0 = pack(s.gamma, s.alpha);
  const StateVector k1 = f(y0);
  const StateVector k2 = f(y0 + 0.5 * h * k1);
  const StateVector k3 = f(y0 + 0.5 * h * k2);
  const StateVector k4 = f(y0 + h * k3);
  const StateVector y1 = y0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!y1.allFinite()) throw DivergenceError("RK4 step produced a non-finite state");
  return {s.t + h, y1.head<3>(), y1.tail<3>()};
}

std::string format_vec(const Vec3& v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.6g, %.6g, %.6g)", v[0], v[1], v[2]);
  return buf;
}

}  // namespace

McmcConfig default_geodesic_mcmc() {
  McmcConfig cfg;
  cfg.kernel = SamplerKernel::uncorrected;
  return cfg;
}

void IntegratorConfig::validate() const {
  if (n < 1) throw InvalidInputError("step count n must be >= 1");
  if (!std::isfinite(a) || !std::isfinite(b) || !(h() > 0.0)) throw InvalidInputError("need b > a");
  if (!std::isfinite(lambda) || lambda < 0.0) throw InvalidInputError("lambda must be finite and >= 0");
  if (mode == CovarianceMode::mcmc) mcmc.validate();
}

ChristoffelUpdate IntegratorConfig::resolved_update() const {
  if (update != ChristoffelUpdate::automatic) return update;
  return mode == CovarianceMode::mcmc ? ChristoffelUpdate::per_iteration : ChristoffelUpdate::per_stage;
}

ChristoffelTensor christoffel_at(const Vec3& theta, const PatchStats& stats, double lambda, int delta,
                                 Dg33BetaForm form) {
  const ModelParams p = ModelParams::from_vector(theta);
  const InverseMetric inv = inverse_metric(metric_tensor(p, stats, delta), lambda);
  return christoffel_specialized(inv, metric_derivatives(p, stats, delta, form));
}

StateVector geodesic_rhs(const GeodesicState& state, const ChristoffelTensor& christoffel) {
  return pack(state.alpha, acceleration(state.alpha, christoffel));
}

GeodesicState rk4_step(const GeodesicState& state, const ChristoffelTensor& christoffel, double h) {
  if (!(h > 0.0)) throw InvalidInputError("step size must be positive");
  return rk4(state, [&](const Vec3&) -> const ChristoffelTensor& { return christoffel; }, h);
}

GeodesicState rk4_step(const GeodesicState& state,
                       const std::function<ChristoffelTensor(const Vec3&)>& christoffel_field, double h) {
  if (!(h > 0.0)) throw InvalidInputError("step size must be positive");
  return rk4(state, christoffel_field, h);
}

GeodesicCurve integrate(const Vec3& start_gamma, const Vec3& start_alpha, const IntegratorConfig& cfg) {
  cfg.validate();
  if (!start_gamma.allFinite() || !start_alpha.allFinite()) throw InvalidInputError("non-finite start state");
  if (!(start_gamma[kSigma2] > 0.0)) throw DomainError("start sigma2 must be positive");

  GeodesicCurve curve;
  curve.seed = cfg.mcmc.seed;
  if ((start_alpha.array().abs() > cfg.alpha_magnitude_warn).any()) {
    curve.warnings.push_back("initial tangent " + format_vec(start_alpha) + " has a component outside [-" +
                             std::to_string(cfg.alpha_magnitude_warn) + ", " +
                             std::to_string(cfg.alpha_magnitude_warn) + "]; integration may be unstable");
  }

  const double h = cfg.h();
  const bool per_stage = cfg.resolved_update() == ChristoffelUpdate::per_stage;
  curve.states.reserve(static_cast<std::size_t>(cfg.n) + 1);
  curve.states.push_back({cfg.a, start_gamma, start_alpha});

  auto stop = [&](int i, const std::string& why) {
    curve.diverged_at = i;
    curve.divergence_reason = why;
    return curve;
  };

  std::optional<FieldSample> field;
  if (cfg.mode == CovarianceMode::frozen) {
    if (cfg.frozen_stats) {
      curve.frozen_stats = cfg.frozen_stats;
    } else {
      McmcConfig mc = cfg.mcmc;
      mc.seed = derive_seed(cfg.mcmc.seed, 0);
      try {
        curve.frozen_stats = patch_stats(
            sample_field(ModelParams::from_vector(start_gamma), NeighborhoodOrder::second, mc));
      } catch (const DivergenceError& e) {
        return stop(0, e.what());
      }
    }
  }

  for (int i = 0; i < cfg.n; ++i) {
    const GeodesicState& cur = curve.states.back();
    const ModelParams params = ModelParams::from_vector(cur.gamma);
    try {
      PatchStats stats;
      if (cfg.mode == CovarianceMode::mcmc) {
        McmcConfig mc = cfg.mcmc;
        mc.seed = derive_seed(cfg.mcmc.seed, static_cast<std::uint64_t>(i));
        std::optional<FieldSample> init;
        if (cfg.warm_start && field) init = std::move(field);
        field = sample_field(params, NeighborhoodOrder::second, mc, std::move(init));
        stats = patch_stats(*field);
      } else {
        stats = *curve.frozen_stats;
      }

      const Mat3 g = metric_tensor(params, stats, cfg.delta).g;
      GeodesicState next;
      if (per_stage) {
        next = rk4_step(
            cur,
            [&](const Vec3& theta) { return christoffel_at(theta, stats, cfg.lambda, cfg.delta, cfg.dg33_form); },
            h);
      } else {
        next = rk4_step(cur, christoffel_at(cur.gamma, stats, cfg.lambda, cfg.delta, cfg.dg33_form), h);
      }
      if (!(next.gamma[kSigma2] > 0.0)) {
        return stop(i, "sigma2 left the positive half-space at t = " + std::to_string(next.t));
      }
      curve.distance += cur.alpha.norm() * h;
      curve.riemannian_length += std::sqrt(std::max(0.0, cur.alpha.dot(g * cur.alpha))) * h;
      curve.states.push_back(next);
    } catch (const DivergenceError& e) {
      return stop(i, e.what());
    } catch (const NumericalError& e) {
      return stop(i, e.what());
    } catch (const DomainError& e) {
      return stop(i, e.what());
    }
  }
  return curve;
}

double euclidean_distance(const Vec3& p, const Vec3& q) { return (p - q).norm(); }

ReversalResult reverse_run(const GeodesicCurve& forward, const IntegratorConfig& cfg) {
  if (forward.diverged_at) throw InvalidInputError("cannot reverse a diverged curve");
  if (forward.states.empty()) throw InvalidInputError("empty curve");
  IntegratorConfig rcfg = cfg;
  if (cfg.mode == CovarianceMode::frozen && forward.frozen_stats) rcfg.frozen_stats = forward.frozen_stats;

  ReversalResult out;
  out.reversed = integrate(forward.back().gamma, -forward.back().alpha, rcfg);
  const std::size_t last = forward.states.size() - 1;
  const std::size_t m = std::min(out.reversed.states.size(), forward.states.size());
  out.divergence.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    out.divergence.push_back(euclidean_distance(out.reversed.states[k].gamma, forward.states[last - k].gamma));
  }
  return out;
}

std::vector<double> riemannian_speeds(const GeodesicCurve& curve, const PatchStats& stats, int delta,
                                      double lambda) {
  std::vector<double> out;
  out.reserve(curve.states.size());
  for (const auto& s : curve.states) {
    const Mat3 g = metric_tensor(ModelParams::from_vector(s.gamma), stats, delta).g + lambda * Mat3::Identity();
    out.push_back(std::sqrt(std::max(0.0, s.alpha.dot(g * s.alpha))));
  }
  return out;
}

}  // namespace gmrfgeo
