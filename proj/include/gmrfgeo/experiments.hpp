#pragma once

// Batch reproduction of the geodesic-vs-Euclidean distance table: every row
// is integrated `repeats` times with seeds derived from a master seed, and
// per-run results are kept alongside median/mean aggregates.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gmrfgeo/geodesic.hpp"
#include "gmrfgeo/types.hpp"

namespace gmrfgeo {

/// One table row: start point, initial tangent and the reference single-run
/// outcome (used only for comparison, never as input).
struct TableEntry {
  Vec3 start = Vec3::Zero();
  Vec3 tangent = Vec3::Zero();
  Vec3 reported_final = Vec3::Zero();
  double reported_gd = 0.0;
  double reported_ed = 0.0;
};

/// The 15 reference rows.
std::vector<TableEntry> default_table();

struct TableConfig {
  IntegratorConfig integrator;
  int repeats = 5;
  std::uint64_t master_seed = 0;
  int threads = 0;  // 0: hardware concurrency
  std::vector<int> rows;  // 0-based subset; empty runs every row
};

/// Result of one seeded run of one row.
struct TableRow {
  int row = 0;
  int repeat = 0;
  Vec3 start = Vec3::Zero();
  Vec3 tangent = Vec3::Zero();
  Vec3 final_pos = Vec3::Zero();
  double gd = 0.0;
  double ed = 0.0;  // recomputed from start and final_pos
  std::uint64_t seed = 0;
  bool diverged = false;
  std::optional<int> diverged_at;
  std::string reason;
};

struct TableRowSummary {
  int row = 0;
  TableEntry entry;
  int completed = 0;
  double median_gd = 0.0;
  double mean_gd = 0.0;
  Vec3 median_final = Vec3::Zero();
  Vec3 mean_final = Vec3::Zero();
  double median_ed = 0.0;
  double reported_endpoint_ed = 0.0;  // E.D. recomputed from the reference endpoints
  bool reported_ed_inconsistent = false;
  bool gd_at_least_ed = true;  // every completed run satisfies gd >= ed
};

struct TableResult {
  std::vector<TableRow> runs;  // ordered by (row, repeat)
  std::vector<TableRowSummary> summaries;
  std::vector<std::string> notes;
};

/// Seed for one run: master + 1000 * row + repeat.
std::uint64_t table_seed(std::uint64_t master, int row, int repeat);

/// Runs the selected rows concurrently (independent seeds, no shared mutable
/// state); a diverged run is recorded and the batch continues.
TableResult run_table(const std::vector<TableEntry>& entries, const TableConfig& cfg);

double median(std::vector<double> values);

}  // namespace gmrfgeo
