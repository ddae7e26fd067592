#pragma once

// CSV and JSON serialization for curves, table batches, metric queries and
// oracle reports, plus JSON config loading for table runs.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmrfgeo/christoffel.hpp"
#include "gmrfgeo/experiments.hpp"
#include "gmrfgeo/fisher_metric.hpp"
#include "gmrfgeo/geodesic.hpp"
#include "gmrfgeo/patch_stats.hpp"
#include "gmrfgeo/validation.hpp"

namespace gmrfgeo {

using Json = nlohmann::ordered_json;

inline constexpr const char* kCurveCsvHeader = "t,mu,sigma2,beta,alpha1,alpha2,alpha3,step_norm,cum_dist";
inline constexpr const char* kTableCsvHeader =
    "mu_a,sigma2_a,beta_a,alpha1,alpha2,alpha3,mu_b,sigma2_b,beta_b,gd,ed,seed,diverged";

/// One row per state, %.12g. step_norm is ||alpha|| h of the step that ended
/// at the row (0 on the first row); cum_dist is the running G.D.
void write_curve_csv(std::ostream& os, const GeodesicCurve& curve, double h);

/// t, ||gamma_rev(t) - gamma_fwd(b - t)||.
void write_divergence_csv(std::ostream& os, const std::vector<double>& divergence, double a, double h);

void write_table_csv(std::ostream& os, const std::vector<TableRow>& runs);
void write_table_summary_csv(std::ostream& os, const std::vector<TableRowSummary>& summaries);

Json to_json(const Vec3& v);
Json to_json(const Mat3& m);  // row-major nested arrays
Json to_json(const ChristoffelTensor& c);
Json to_json(const PatchStats& s);
Json to_json(const OracleReport& r);
Json to_json(const DerivativeOracleReport& r);
Json to_json(const ScoreCheckReport& r);
Json to_json(const TableRowSummary& s);

/// start/end/G.D./E.D./diverged_at/seed plus diagnostics.
Json curve_summary(const GeodesicCurve& curve, const IntegratorConfig& cfg);

Vec3 vec3_from_json(const Json& j);
std::string mode_name(CovarianceMode mode);
CovarianceMode parse_mode(const std::string& name);
SamplerKernel parse_kernel(const std::string& name);
std::string kernel_name(SamplerKernel kernel);

/// Overlays the keys present in `j` onto `cfg`. Recognized keys: a, b, n,
/// lambda, mode, warm_start, lattice [H, W], burn_in, sweeps, kernel,
/// divergence_threshold, seed.
void apply_integrator_json(const Json& j, IntegratorConfig& cfg);

struct TableSpec {
  std::vector<TableEntry> entries;
  TableConfig config;
};

/// Table batch config: {"repeats", "seed", "threads", "rows": [indices],
/// "integrator": {...}, "entries": [{"start", "tangent", "reported_final",
/// "reported_gd", "reported_ed"}]}. Missing "entries" means the default table.
TableSpec load_table_spec(const std::string& path);
TableSpec parse_table_spec(const Json& j);

}  // namespace gmrfgeo
