// Command-line front end: field sampling, metric/entropy queries, single
// geodesic runs, reversal experiments, table batches and oracle validation.
//
// Exit status: 0 ok, 1 validation failure, 2 usage error, 3 divergence,
// 4 domain/numerical error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gmrfgeo/christoffel.hpp"
#include "gmrfgeo/errors.hpp"
#include "gmrfgeo/experiments.hpp"
#include "gmrfgeo/fisher_metric.hpp"
#include "gmrfgeo/geodesic.hpp"
#include "gmrfgeo/io.hpp"
#include "gmrfgeo/patch_stats.hpp"
#include "gmrfgeo/sampler.hpp"
#include "gmrfgeo/validation.hpp"

namespace fs = std::filesystem;
using namespace gmrfgeo;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitDomain = 4;

struct ParamOpts {
  double mu = 0.0;
  double sigma2 = 1.0;
  double beta = 0.0;
  bool analytic = false;  // use i.i.d. statistics instead of a sampled field
  ModelParams params() const { return {mu, sigma2, beta}; }
};

struct McmcOpts {
  std::vector<int> lattice{64, 64};
  int burnin = 100;
  int sweeps = 5;
  std::string kernel;
  double divergence_threshold = 50.0;
  bool interior = false;

  void apply(McmcConfig& cfg) const {
    if (lattice.size() != 2) throw InvalidInputError("--lattice expects H,W");
    cfg.rows = lattice[0];
    cfg.cols = lattice[1];
    cfg.burn_in_sweeps = burnin;
    cfg.sweeps_per_sample = sweeps;
    cfg.divergence_threshold = divergence_threshold;
    if (!kernel.empty()) cfg.kernel = parse_kernel(kernel);
    cfg.boundary = interior ? Boundary::interior_only : Boundary::toroidal;
  }
};

struct Common {
  std::uint64_t seed = 0;
  std::string out = ".";
  bool json = false;
};

void add_params(CLI::App* cmd, ParamOpts& p, bool with_analytic) {
  cmd->add_option("--mu", p.mu, "Mean")->capture_default_str();
  cmd->add_option("--sigma2", p.sigma2, "Variance")->capture_default_str();
  cmd->add_option("--beta", p.beta, "Inverse temperature")->capture_default_str();
  if (with_analytic) cmd->add_flag("--analytic", p.analytic, "Use independence statistics sigma2 * I");
}

void add_mcmc(CLI::App* cmd, McmcOpts& m, const std::string& default_kernel) {
  m.kernel = default_kernel;
  cmd->add_option("--lattice", m.lattice, "Lattice size H,W")->delimiter(',')->expected(2)->capture_default_str();
  cmd->add_option("--burnin", m.burnin, "Burn-in sweeps for a cold start")->capture_default_str();
  cmd->add_option("--sweeps", m.sweeps, "Sweeps per warm-started sample")->capture_default_str();
  cmd->add_option("--kernel", m.kernel, "MCMC kernel: gibbs | metropolis | uncorrected")->capture_default_str();
  cmd->add_option("--divergence-threshold", m.divergence_threshold, "Sampler abort threshold in sqrt(sigma2) units")
      ->capture_default_str();
  cmd->add_flag("--interior", m.interior, "Free boundary (interior sites only) instead of toroidal");
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
  cmd->add_flag("--json", c.json, "Print machine-readable JSON to stdout");
}

Vec3 to_vec3(const std::vector<double>& v, const char* flag) {
  if (v.size() != 3) throw InvalidInputError(std::string(flag) + " expects three comma-separated values");
  return {v[0], v[1], v[2]};
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw InvalidInputError("cannot write " + p.string());
  return os;
}

void write_json_file(const fs::path& p, const Json& j) {
  auto os = open_out(p);
  os << j.dump(2) << '\n';
}

PatchStats stats_for(const ParamOpts& p, const McmcOpts& m, std::uint64_t seed) {
  if (p.analytic) return independence_stats(p.sigma2);
  McmcConfig cfg;
  cfg.seed = seed;
  m.apply(cfg);
  return patch_stats(sample_field(p.params(), NeighborhoodOrder::second, cfg));
}

// ---- sample ----------------------------------------------------------------

struct SampleCmd {
  ParamOpts p;
  McmcOpts m;
  Common c;
  std::string file = "field.csv";

  int run() const {
    McmcConfig cfg;
    cfg.seed = c.seed;
    m.apply(cfg);
    const FieldSample field = sample_field(p.params(), NeighborhoodOrder::second, cfg);
    const fs::path path = fs::path(c.out) / file;
    {
      auto os = open_out(path);
      write_field_csv(os, field);
    }
    Json j = {{"field", path.string()},
              {"rows", field.rows()},
              {"cols", field.cols()},
              {"seed", c.seed},
              {"kernel", kernel_name(cfg.kernel)},
              {"stats", to_json(patch_stats(field))}};
    if (!c.json) j.erase("stats");
    std::cout << j.dump() << '\n';
    return 0;
  }
};

// ---- metric / entropy ------------------------------------------------------

struct MetricCmd {
  ParamOpts p;
  McmcOpts m;
  Common c;
  bool inverse = false;
  bool derivatives = false;
  bool christoffel = false;
  double lambda = 0.01;

  int run() const {
    const ModelParams params = p.params();
    params.validate();
    const PatchStats stats = stats_for(p, m, c.seed);
    const MetricTensor g = metric_tensor(params, stats);
    Json j = {{"theta", to_json(params.as_vector())}, {"analytic", p.analytic}, {"g", to_json(g.g)}};
    if (inverse || christoffel) {
      const InverseMetric inv = inverse_metric(g, lambda);
      if (inverse) j["g_inv"] = to_json(inv.g_inv);
      j["lambda"] = lambda;
      if (christoffel) j["christoffel"] = to_json(christoffel_specialized(inv, metric_derivatives(params, stats)));
    }
    if (derivatives) {
      const MetricDerivatives d = metric_derivatives(params, stats);
      j["dg_dsigma2"] = to_json(d.d_sigma2);
      j["dg_dbeta"] = to_json(d.d_beta);
    }
    if (c.json) j["stats"] = to_json(stats);
    std::cout << j.dump() << '\n';
    return 0;
  }
};

struct EntropyCmd {
  ParamOpts p;
  McmcOpts m;
  Common c;

  int run() const {
    const ModelParams params = p.params();
    params.validate();
    const EntropyValue e = entropy(params, stats_for(p, m, c.seed));
    if (c.json) {
      std::cout << Json{{"theta", to_json(params.as_vector())}, {"h_beta", e.h_beta}, {"h_gauss", e.h_gauss}}.dump()
                << '\n';
    } else {
      std::printf("%.10g\n", e.h_beta);
    }
    return 0;
  }
};

// ---- geodesic / reverse ----------------------------------------------------

struct GeodesicOpts {
  std::vector<double> start{0.0, 1.0, 0.0};
  std::vector<double> tangent{0.0, 0.0, 0.1};
  double a = 0.0;
  double b = 5.0;
  int steps = 200;
  std::string mode = "mcmc";
  double lambda = 0.01;
  bool cold = false;
  bool analytic = false;
  std::string update = "auto";

  void add(CLI::App* cmd) {
    cmd->add_option("--start", start, "Start point mu,sigma2,beta")->delimiter(',')->expected(3);
    cmd->add_option("--tangent", tangent, "Initial tangent a1,a2,a3")->delimiter(',')->expected(3);
    cmd->add_option("--a", a, "Start time")->capture_default_str();
    cmd->add_option("--b", b, "End time")->capture_default_str();
    cmd->add_option("--steps", steps, "Number of RK4 steps")->capture_default_str();
    cmd->add_option("--mode", mode, "Covariance mode: mcmc | frozen")->capture_default_str();
    cmd->add_option("--lambda", lambda, "Metric regularizer")->capture_default_str();
    cmd->add_option("--christoffel-update", update, "auto | step | stage")->capture_default_str();
    cmd->add_flag("--cold", cold, "Cold-start the sampler every iteration");
    cmd->add_flag("--analytic", analytic, "Frozen mode with independence statistics at the start point");
  }

  IntegratorConfig config(const McmcOpts& m, std::uint64_t seed) const {
    IntegratorConfig cfg;
    cfg.a = a;
    cfg.b = b;
    cfg.n = steps;
    cfg.lambda = lambda;
    cfg.mode = parse_mode(mode);
    cfg.warm_start = !cold;
    m.apply(cfg.mcmc);
    cfg.mcmc.seed = seed;
    if (update == "step") {
      cfg.update = ChristoffelUpdate::per_iteration;
    } else if (update == "stage") {
      cfg.update = ChristoffelUpdate::per_stage;
    } else if (update != "auto") {
      throw InvalidInputError("--christoffel-update expects auto, step or stage");
    }
    if (analytic) {
      if (cfg.mode != CovarianceMode::frozen) throw InvalidInputError("--analytic requires --mode frozen");
      cfg.frozen_stats = independence_stats(start.at(1));
    }
    return cfg;
  }
};

void report_warnings(const GeodesicCurve& curve) {
  for (const auto& w : curve.warnings) std::cerr << "warning: " << w << '\n';
}

struct GeodesicCmd {
  GeodesicOpts g;
  McmcOpts m;
  Common c;

  int run() const {
    const IntegratorConfig cfg = g.config(m, c.seed);
    const GeodesicCurve curve = integrate(to_vec3(g.start, "--start"), to_vec3(g.tangent, "--tangent"), cfg);
    report_warnings(curve);
    const fs::path dir(c.out);
    {
      auto os = open_out(dir / "curve.csv");
      write_curve_csv(os, curve, cfg.h());
    }
    const Json summary = curve_summary(curve, cfg);
    write_json_file(dir / "summary.json", summary);
    if (c.json) {
      std::cout << summary.dump() << '\n';
    } else {
      Json line = {{"gd", summary["gd"]}, {"ed", summary["ed"]}, {"end", summary["end"]}};
      if (curve.diverged_at) line["diverged_at"] = *curve.diverged_at;
      std::cout << line.dump() << '\n';
    }
    if (curve.diverged_at) {
      std::cerr << "diverged at step " << *curve.diverged_at << ": " << curve.divergence_reason << '\n';
      return kExitDivergence;
    }
    return 0;
  }
};

struct ReverseCmd {
  GeodesicOpts g;
  McmcOpts m;
  Common c;

  int run() const {
    const IntegratorConfig cfg = g.config(m, c.seed);
    const GeodesicCurve fwd = integrate(to_vec3(g.start, "--start"), to_vec3(g.tangent, "--tangent"), cfg);
    report_warnings(fwd);
    const fs::path dir(c.out);
    {
      auto os = open_out(dir / "forward.csv");
      write_curve_csv(os, fwd, cfg.h());
    }
    if (fwd.diverged_at) {
      std::cerr << "forward run diverged at step " << *fwd.diverged_at << ": " << fwd.divergence_reason << '\n';
      return kExitDivergence;
    }
    // The reversed run uses its own seed stream so it does not replay the
    // forward chain.
    IntegratorConfig rcfg = cfg;
    rcfg.mcmc.seed = derive_seed(c.seed, 0x7265766572736500ull);
    const ReversalResult rev = reverse_run(fwd, rcfg);
    {
      auto os = open_out(dir / "reversed.csv");
      write_curve_csv(os, rev.reversed, cfg.h());
    }
    {
      auto os = open_out(dir / "divergence.csv");
      write_divergence_csv(os, rev.divergence, cfg.a, cfg.h());
    }
    double max_div = 0.0;
    for (double d : rev.divergence) max_div = std::max(max_div, d);
    Json summary = {{"forward", curve_summary(fwd, cfg)},
                    {"reversed", curve_summary(rev.reversed, rcfg)},
                    {"return_error", euclidean_distance(rev.reversed.back().gamma, fwd.front().gamma)},
                    {"max_divergence", max_div}};
    write_json_file(dir / "reverse_summary.json", summary);
    std::cout << (c.json ? summary.dump()
                         : Json{{"return_error", summary["return_error"]}, {"max_divergence", max_div}}.dump())
              << '\n';
    if (rev.reversed.diverged_at) {
      std::cerr << "reversed run diverged at step " << *rev.reversed.diverged_at << '\n';
      return kExitDivergence;
    }
    return 0;
  }
};

// ---- table -----------------------------------------------------------------

struct TableCmd {
  std::string config;
  Common c;
  int repeats = 0;
  int threads = 0;
  std::vector<int> rows;
  bool seed_given = false;

  int run() const {
    TableSpec spec;
    if (config.empty()) {
      spec.entries = default_table();
    } else {
      spec = load_table_spec(config);
    }
    if (repeats > 0) spec.config.repeats = repeats;
    if (threads > 0) spec.config.threads = threads;
    if (seed_given) spec.config.master_seed = c.seed;
    if (!rows.empty()) {
      spec.config.rows.clear();
      for (int r : rows) spec.config.rows.push_back(r - 1);
    }
    const TableResult res = run_table(spec.entries, spec.config);
    const fs::path dir(c.out);
    {
      auto os = open_out(dir / "table_runs.csv");
      write_table_csv(os, res.runs);
    }
    {
      auto os = open_out(dir / "table_summary.csv");
      write_table_summary_csv(os, res.summaries);
    }
    Json j = {{"repeats", spec.config.repeats}, {"seed", spec.config.master_seed}, {"rows", Json::array()},
              {"notes", res.notes}};
    for (const auto& s : res.summaries) j["rows"].push_back(to_json(s));
    write_json_file(dir / "table.json", j);
    for (const auto& n : res.notes) std::cerr << "note: " << n << '\n';
    if (c.json) {
      std::cout << j.dump() << '\n';
    } else {
      std::printf("%4s %9s %9s %9s %9s  %s\n", "row", "median_gd", "ref_gd", "median_ed", "ref_ed", "completed");
      for (const auto& s : res.summaries) {
        std::printf("%4d %9.3f %9.3f %9.3f %9.3f  %d/%d\n", s.row + 1, s.median_gd, s.entry.reported_gd, s.median_ed,
                    s.entry.reported_ed, s.completed, spec.config.repeats);
      }
    }
    return 0;
  }
};

// ---- validate --------------------------------------------------------------

struct ValidateCmd {
  std::vector<double> theta{0.0, 1.0, 0.0};
  int fields = 30;
  McmcOpts m;
  Common c;
  double diag_tol = 0.10;
  double fd_step = 1e-4;

  int run() const {
    const ModelParams params = ModelParams::from_vector(to_vec3(theta, "--theta"));
    params.validate();
    McmcConfig cfg;
    cfg.seed = c.seed;
    m.apply(cfg);
    const OracleReport fisher =
        mc_fisher(params, NeighborhoodOrder::second, cfg, fields, {.diag_rel = diag_tol, .offdiag_z = 3.0});

    // Derivative and score oracles on statistics from one field at theta.
    const FieldSample field = sample_field(params, NeighborhoodOrder::second, cfg);
    const PatchStats stats = patch_stats(field);
    const double step = std::min(fd_step, 0.5 * params.sigma2);
    const DerivativeOracleReport deriv = fd_metric_derivatives(params, stats, 8, step);
    std::vector<ScoreSample> samples;
    for (Eigen::Index r = 0; r < std::min<Eigen::Index>(field.rows(), 10); ++r) {
      const auto nb = gather_neighbors(field, r, r, NeighborhoodOrder::second);
      samples.push_back({field.values(r, r), std::vector<double>(nb.begin(), nb.begin() + 8)});
    }
    const ScoreCheckReport sc = fd_score_check(params, samples, std::min(1e-5, 0.5 * params.sigma2));

    const bool ok = fisher.passed && deriv.passed && sc.passed;
    Json j = {{"theta", to_json(params.as_vector())},
              {"fields", fields},
              {"seed", c.seed},
              {"mc_fisher", to_json(fisher)},
              {"fd_metric_derivatives", to_json(deriv)},
              {"fd_score", to_json(sc)},
              {"passed", ok}};
    write_json_file(fs::path(c.out) / "validate.json", j);
    std::cout << (c.json ? j.dump()
                         : Json{{"passed", ok},
                                {"mc_fisher_max_rel_diag", fisher.max_rel_error_diag},
                                {"mc_fisher_max_offdiag_z", fisher.max_offdiag_z},
                                {"fd_derivative_max_rel", deriv.max_rel_error},
                                {"fd_score_max_rel", sc.max_rel_error}}
                               .dump())
              << '\n';
    return ok ? 0 : kExitValidation;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesics on the parametric manifold of pairwise isotropic Gaussian-Markov random fields"};
  app.require_subcommand(1);

  SampleCmd sample;
  auto* c_sample = app.add_subcommand("sample", "Generate a field by MCMC and write it as CSV");
  add_params(c_sample, sample.p, false);
  add_mcmc(c_sample, sample.m, "gibbs");
  add_common(c_sample, sample.c);
  c_sample->add_option("--file", sample.file, "Output file name inside --out")->capture_default_str();

  MetricCmd metric;
  auto* c_metric = app.add_subcommand("metric", "Fisher metric (and optionally inverse, derivatives, Christoffel)");
  add_params(c_metric, metric.p, true);
  add_mcmc(c_metric, metric.m, "gibbs");
  add_common(c_metric, metric.c);
  c_metric->add_flag("--inverse", metric.inverse, "Include the regularized inverse");
  c_metric->add_flag("--derivatives", metric.derivatives, "Include dg/dsigma2 and dg/dbeta");
  c_metric->add_flag("--christoffel", metric.christoffel, "Include the Christoffel symbols");
  c_metric->add_option("--lambda", metric.lambda, "Regularizer for the inverse")->capture_default_str();

  EntropyCmd ent;
  auto* c_entropy = app.add_subcommand("entropy", "Entropy of the model at theta");
  add_params(c_entropy, ent.p, true);
  add_mcmc(c_entropy, ent.m, "gibbs");
  add_common(c_entropy, ent.c);

  GeodesicCmd geo;
  auto* c_geo = app.add_subcommand("geodesic", "Integrate one geodesic; writes curve.csv and summary.json");
  geo.g.add(c_geo);
  add_mcmc(c_geo, geo.m, "uncorrected");
  add_common(c_geo, geo.c);

  ReverseCmd rev;
  auto* c_rev = app.add_subcommand("reverse", "Forward run, then the time-reversed run from its endpoint");
  rev.g.add(c_rev);
  add_mcmc(c_rev, rev.m, "uncorrected");
  add_common(c_rev, rev.c);

  TableCmd table;
  auto* c_table = app.add_subcommand("table", "Batch reproduction of the distance table");
  c_table->add_option("--config", table.config, "JSON batch config (default: built-in 15 rows)");
  c_table->add_option("--repeats", table.repeats, "Runs per row (overrides config)");
  c_table->add_option("--threads", table.threads, "Worker threads (0: all cores)");
  c_table->add_option("--rows", table.rows, "1-based row subset, e.g. 2,3,4,9")->delimiter(',');
  add_common(c_table, table.c);

  ValidateCmd val;
  auto* c_val = app.add_subcommand("validate", "Monte-Carlo Fisher and finite-difference oracles");
  c_val->add_option("--theta", val.theta, "Parameters mu,sigma2,beta")->delimiter(',')->expected(3);
  c_val->add_option("--fields", val.fields, "Number of sampled fields")->capture_default_str();
  c_val->add_option("--diag-tol", val.diag_tol, "Relative tolerance on the diagonal")->capture_default_str();
  add_mcmc(c_val, val.m, "gibbs");
  add_common(c_val, val.c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  table.seed_given = c_table->count("--seed") > 0;

  try {
    if (*c_sample) return sample.run();
    if (*c_metric) return metric.run();
    if (*c_entropy) return ent.run();
    if (*c_geo) return geo.run();
    if (*c_rev) return rev.run();
    if (*c_table) return table.run();
    if (*c_val) return val.run();
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
