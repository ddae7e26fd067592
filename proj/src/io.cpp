#include "gmrfgeo/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "gmrfgeo/errors.hpp"

namespace gmrfgeo {
namespace {

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void write_curve_csv(std::ostream& os, const GeodesicCurve& curve, double h) {
  os << kCurveCsvHeader << '\n';
  double cum = 0.0;
  for (std::size_t k = 0; k < curve.states.size(); ++k) {
    const GeodesicState& s = curve.states[k];
    const double step = k == 0 ? 0.0 : curve.states[k - 1].alpha.norm() * h;
    cum += step;
    os << fmt12(s.t) << ',' << fmt12(s.gamma[0]) << ',' << fmt12(s.gamma[1]) << ',' << fmt12(s.gamma[2]) << ','
       << fmt12(s.alpha[0]) << ',' << fmt12(s.alpha[1]) << ',' << fmt12(s.alpha[2]) << ',' << fmt12(step) << ','
       << fmt12(cum) << '\n';
  }
}

void write_divergence_csv(std::ostream& os, const std::vector<double>& divergence, double a, double h) {
  os << "t,divergence\n";
  for (std::size_t k = 0; k < divergence.size(); ++k) {
    os << fmt12(a + static_cast<double>(k) * h) << ',' << fmt12(divergence[k]) << '\n';
  }
}

void write_table_csv(std::ostream& os, const std::vector<TableRow>& runs) {
  os << kTableCsvHeader << '\n';
  for (const TableRow& r : runs) {
    os << fmt12(r.start[0]) << ',' << fmt12(r.start[1]) << ',' << fmt12(r.start[2]) << ',' << fmt12(r.tangent[0])
       << ',' << fmt12(r.tangent[1]) << ',' << fmt12(r.tangent[2]) << ',' << fmt12(r.final_pos[0]) << ','
       << fmt12(r.final_pos[1]) << ',' << fmt12(r.final_pos[2]) << ',' << fmt12(r.gd) << ',' << fmt12(r.ed) << ','
       << r.seed << ',' << (r.diverged ? 1 : 0) << '\n';
  }
}

void write_table_summary_csv(std::ostream& os, const std::vector<TableRowSummary>& summaries) {
  os << "row,completed,median_gd,mean_gd,median_ed,median_mu_b,median_sigma2_b,median_beta_b,"
        "reported_gd,reported_ed,reported_endpoint_ed,reported_ed_inconsistent,gd_at_least_ed\n";
  for (const TableRowSummary& s : summaries) {
    os << s.row + 1 << ',' << s.completed << ',' << fmt12(s.median_gd) << ',' << fmt12(s.mean_gd) << ','
       << fmt12(s.median_ed) << ',' << fmt12(s.median_final[0]) << ',' << fmt12(s.median_final[1]) << ','
       << fmt12(s.median_final[2]) << ',' << fmt12(s.entry.reported_gd) << ',' << fmt12(s.entry.reported_ed)
       << ',' << fmt12(s.reported_endpoint_ed) << ',' << (s.reported_ed_inconsistent ? 1 : 0) << ','
       << (s.gd_at_least_ed ? 1 : 0) << '\n';
  }
}

Json to_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

Json to_json(const Mat3& m) {
  Json out = Json::array();
  for (int i = 0; i < 3; ++i) out.push_back(Json::array({m(i, 0), m(i, 1), m(i, 2)}));
  return out;
}

Json to_json(const ChristoffelTensor& c) {
  Json out = Json::array();
  for (int k = 0; k < 3; ++k) out.push_back(to_json(c[k]));
  return out;
}

Json to_json(const PatchStats& s) {
  Json sm = Json::array();
  for (int i = 0; i < 8; ++i) {
    Json row = Json::array();
    for (int j = 0; j < 8; ++j) row.push_back(s.sigma_minus(i, j));
    sm.push_back(row);
  }
  Json rho = Json::array();
  for (int i = 0; i < 8; ++i) rho.push_back(s.rho[i]);
  return {{"center_variance", s.sigma_p(kPatchCenter, kPatchCenter)},
          {"rho", rho},
          {"sigma_minus", sm},
          {"n_patches", s.n_patches}};
}

Json to_json(const OracleReport& r) {
  return {{"estimate", to_json(r.estimate)},
          {"reference", to_json(r.reference)},
          {"std_error", to_json(r.std_error)},
          {"max_rel_error_diag", r.max_rel_error_diag},
          {"max_abs_error_offdiag", r.max_abs_error_offdiag},
          {"max_offdiag_z", r.max_offdiag_z},
          {"n_samples", r.n_samples},
          {"passed", r.passed}};
}

Json to_json(const DerivativeOracleReport& r) {
  return {{"d_sigma2", to_json(r.sigma2)}, {"d_beta", to_json(r.beta)},       {"mu_slope_max", r.mu_slope_max},
          {"max_rel_error", r.max_rel_error}, {"tolerance", r.tolerance}, {"passed", r.passed}};
}

Json to_json(const ScoreCheckReport& r) {
  return {{"max_rel_error", r.max_rel_error}, {"n_samples", r.n_samples}, {"passed", r.passed}};
}

Json to_json(const TableRowSummary& s) {
  return {{"row", s.row + 1},
          {"start", to_json(s.entry.start)},
          {"tangent", to_json(s.entry.tangent)},
          {"completed", s.completed},
          {"median_gd", s.median_gd},
          {"mean_gd", s.mean_gd},
          {"median_ed", s.median_ed},
          {"median_final", to_json(s.median_final)},
          {"mean_final", to_json(s.mean_final)},
          {"reported_final", to_json(s.entry.reported_final)},
          {"reported_gd", s.entry.reported_gd},
          {"reported_ed", s.entry.reported_ed},
          {"reported_endpoint_ed", s.reported_endpoint_ed},
          {"reported_ed_inconsistent", s.reported_ed_inconsistent},
          {"gd_at_least_ed", s.gd_at_least_ed}};
}

Json curve_summary(const GeodesicCurve& curve, const IntegratorConfig& cfg) {
  const Vec3& start = curve.front().gamma;
  const Vec3& end = curve.back().gamma;
  Json j = {{"start", to_json(start)},
            {"tangent", to_json(curve.front().alpha)},
            {"end", to_json(end)},
            {"gd", curve.distance},
            {"ed", euclidean_distance(start, end)},
            {"riemannian_length", curve.riemannian_length},
            {"diverged_at", nullptr},
            {"seed", curve.seed},
            {"mode", mode_name(cfg.mode)},
            {"a", cfg.a},
            {"b", cfg.b},
            {"n", cfg.n},
            {"lambda", cfg.lambda},
            {"states", curve.states.size()},
            {"warnings", curve.warnings}};
  if (curve.diverged_at) {
    j["diverged_at"] = *curve.diverged_at;
    j["divergence_reason"] = curve.divergence_reason;
  }
  return j;
}

Vec3 vec3_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw InvalidInputError("expected a 3-element array, got " + j.dump());
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::string mode_name(CovarianceMode mode) { return mode == CovarianceMode::mcmc ? "mcmc" : "frozen"; }

CovarianceMode parse_mode(const std::string& name) {
  if (name == "mcmc") return CovarianceMode::mcmc;
  if (name == "frozen") return CovarianceMode::frozen;
  throw InvalidInputError("unknown mode '" + name + "' (expected mcmc or frozen)");
}

SamplerKernel parse_kernel(const std::string& name) {
  if (name == "gibbs") return SamplerKernel::gibbs;
  if (name == "metropolis") return SamplerKernel::metropolis;
  if (name == "uncorrected") return SamplerKernel::uncorrected;
  throw InvalidInputError("unknown kernel '" + name + "' (expected gibbs, metropolis or uncorrected)");
}

std::string kernel_name(SamplerKernel kernel) {
  switch (kernel) {
    case SamplerKernel::gibbs:
      return "gibbs";
    case SamplerKernel::metropolis:
      return "metropolis";
    case SamplerKernel::uncorrected:
      return "uncorrected";
  }
  return "gibbs";
}

void apply_integrator_json(const Json& j, IntegratorConfig& cfg) {
  if (!j.is_object()) throw InvalidInputError("integrator config must be a JSON object");
  if (j.contains("a")) cfg.a = j["a"].get<double>();
  if (j.contains("b")) cfg.b = j["b"].get<double>();
  if (j.contains("n")) cfg.n = j["n"].get<int>();
  if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
  if (j.contains("mode")) cfg.mode = parse_mode(j["mode"].get<std::string>());
  if (j.contains("warm_start")) cfg.warm_start = j["warm_start"].get<bool>();
  if (j.contains("lattice")) {
    const Json& l = j["lattice"];
    if (!l.is_array() || l.size() != 2) throw InvalidInputError("lattice must be [H, W]");
    cfg.mcmc.rows = l[0].get<int>();
    cfg.mcmc.cols = l[1].get<int>();
  }
  if (j.contains("burn_in")) cfg.mcmc.burn_in_sweeps = j["burn_in"].get<int>();
  if (j.contains("sweeps")) cfg.mcmc.sweeps_per_sample = j["sweeps"].get<int>();
  if (j.contains("kernel")) cfg.mcmc.kernel = parse_kernel(j["kernel"].get<std::string>());
  if (j.contains("divergence_threshold")) cfg.mcmc.divergence_threshold = j["divergence_threshold"].get<double>();
  if (j.contains("seed")) cfg.mcmc.seed = j["seed"].get<std::uint64_t>();
}

TableSpec parse_table_spec(const Json& j) {
  if (!j.is_object()) throw InvalidInputError("table config must be a JSON object");
  TableSpec spec;
  try {
    if (j.contains("repeats")) spec.config.repeats = j["repeats"].get<int>();
    if (j.contains("seed")) spec.config.master_seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) spec.config.threads = j["threads"].get<int>();
    if (j.contains("rows")) spec.config.rows = j["rows"].get<std::vector<int>>();
    if (j.contains("integrator")) apply_integrator_json(j["integrator"], spec.config.integrator);
    if (j.contains("entries")) {
      for (const Json& e : j["entries"]) {
        TableEntry t;
        t.start = vec3_from_json(e.at("start"));
        t.tangent = vec3_from_json(e.at("tangent"));
        if (e.contains("reported_final")) t.reported_final = vec3_from_json(e["reported_final"]);
        t.reported_gd = e.value("reported_gd", 0.0);
        t.reported_ed = e.value("reported_ed", 0.0);
        spec.entries.push_back(t);
      }
    } else {
      spec.entries = default_table();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError(std::string("bad table config: ") + e.what());
  }
  if (spec.config.repeats < 1) throw InvalidInputError("repeats must be >= 1");
  return spec;
}

TableSpec load_table_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open config file: " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError("cannot parse " + path + ": " + e.what());
  }
  return parse_table_spec(j);
}

}  // namespace gmrfgeo
