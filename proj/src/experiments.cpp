#include "gmrfgeo/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include "gmrfgeo/errors.hpp"

namespace gmrfgeo {
namespace {

// Several reference E.D. values differ from their own endpoints by a few
// percent; only gross mismatches are flagged.
constexpr double kReportedEdRelTolerance = 0.10;

TableRow run_one(const TableEntry& e, int row, int repeat, const TableConfig& cfg) {
  IntegratorConfig ic = cfg.integrator;
  ic.mcmc.seed = table_seed(cfg.master_seed, row, repeat);
  TableRow out;
  out.row = row;
  out.repeat = repeat;
  out.start = e.start;
  out.tangent = e.tangent;
  out.seed = ic.mcmc.seed;
  const GeodesicCurve curve = integrate(e.start, e.tangent, ic);
  out.final_pos = curve.back().gamma;
  out.gd = curve.distance;
  out.ed = euclidean_distance(out.start, out.final_pos);
  out.diverged = curve.diverged_at.has_value();
  out.diverged_at = curve.diverged_at;
  out.reason = curve.divergence_reason;
  return out;
}

}  // namespace

std::vector<TableEntry> default_table() {
  // start, tangent, final, G.D., E.D.
  return {
      {{0.0, 1.0, 0.0}, {0.0, 0.0, 0.1}, {0.0, 1.203, 0.465}, 0.686, 0.631},
      {{0.0, 1.0, 0.0}, {0.1, 0.1, 0.2}, {0.921, 1.116, -0.655}, 1.667, 1.137},
      {{5.0, 10.0, 0.0}, {0.1, 0.1, -0.1}, {5.102, 11.525, -0.487}, 1.629, 1.596},
      {{5.0, 10.0, -1.0}, {0.1, -0.1, 0.2}, {7.238, 12.495, -1.379}, 3.794, 3.37},
      {{5.0, 10.0, 0.5}, {-0.1, -0.1, -0.2}, {1.908, 12.031, 1.451}, 5.292, 3.819},
      {{1.0, 1.0, -1.0}, {0.2, 0.2, 0.2}, {1.568, 1.720, -2.736}, 2.194, 1.933},
      {{0.0, 100.0, 0.0}, {0.2, -1.0, 0.2}, {0.586, 96.500, 0.600}, 3.58, 3.53},
      {{1.0, 1.0, -1.0}, {0.02, 0.02, 0.2}, {1.705, 2.550, -1.786}, 2.863, 1.879},
      {{1.0, 1.0, 0.0}, {0.05, 0.05, 0.05}, {1.681, 1.141, -0.130}, 0.805, 0.702},
      {{1.0, 1.0, 0.0}, {-0.05, -0.05, 0.1}, {0.212, 0.581, -0.230}, 1.161, 0.905},
      {{10.0, 5.0, 0.0}, {-0.25, 0.25, 0.8}, {9.818, 6.084, 1.311}, 1.942, 1.662},
      {{10.0, 5.0, 0.0}, {2.0, 0.05, 0.1}, {10.891, 5.160, -1.133}, 1.819, 1.383},
      {{5.0, 1.0, 0.0}, {0.0, 0.5, 0.2}, {5.0, 2.169, 0.879}, 1.556, 1.431},
      {{0.0, 1.0, 0.0}, {0.01, 0.5, 0.2}, {0.068, 2.194, 0.893}, 1.579, 1.461},
      {{5.0, 10.0, -0.5}, {0.01, 0.01, 0.2}, {5.863, 13.438, 0.855}, 4.503, 4.027},
  };
}

std::uint64_t table_seed(std::uint64_t master, int row, int repeat) {
  return master + 1000u * static_cast<std::uint64_t>(row) + static_cast<std::uint64_t>(repeat);
}

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

TableResult run_table(const std::vector<TableEntry>& entries, const TableConfig& cfg) {
  if (cfg.repeats < 1) throw InvalidInputError("repeats must be >= 1");
  cfg.integrator.validate();
  std::vector<int> rows = cfg.rows;
  if (rows.empty()) {
    rows.resize(entries.size());
    std::iota(rows.begin(), rows.end(), 0);
  }
  for (int r : rows) {
    if (r < 0 || static_cast<std::size_t>(r) >= entries.size()) {
      throw InvalidInputError("table row index out of range: " + std::to_string(r));
    }
  }

  // Work items in (row, repeat) order; each worker writes only its own slot.
  const std::size_t n_jobs = rows.size() * static_cast<std::size_t>(cfg.repeats);
  TableResult result;
  result.runs.resize(n_jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < n_jobs; j = next++) {
      const int row = rows[j / static_cast<std::size_t>(cfg.repeats)];
      const int rep = static_cast<int>(j % static_cast<std::size_t>(cfg.repeats));
      const TableEntry& e = entries[static_cast<std::size_t>(row)];
      try {
        result.runs[j] = run_one(e, row, rep, cfg);
      } catch (const std::exception& ex) {
        TableRow& t = result.runs[j];
        t.row = row;
        t.repeat = rep;
        t.start = e.start;
        t.tangent = e.tangent;
        t.final_pos = e.start;
        t.seed = table_seed(cfg.master_seed, row, rep);
        t.diverged = true;
        t.diverged_at = 0;
        t.reason = ex.what();
      }
    }
  };
  unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(n_jobs)));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  for (int row : rows) {
    TableRowSummary s;
    s.row = row;
    s.entry = entries[static_cast<std::size_t>(row)];
    std::vector<double> gd, ed, f0, f1, f2;
    for (const TableRow& t : result.runs) {
      if (t.row != row || t.diverged) continue;
      gd.push_back(t.gd);
      ed.push_back(t.ed);
      f0.push_back(t.final_pos[0]);
      f1.push_back(t.final_pos[1]);
      f2.push_back(t.final_pos[2]);
      if (t.gd < t.ed - 1e-9) s.gd_at_least_ed = false;
    }
    s.completed = static_cast<int>(gd.size());
    if (s.completed > 0) {
      const double n = static_cast<double>(s.completed);
      s.median_gd = median(gd);
      s.mean_gd = std::accumulate(gd.begin(), gd.end(), 0.0) / n;
      s.median_ed = median(ed);
      s.median_final = {median(f0), median(f1), median(f2)};
      s.mean_final = {std::accumulate(f0.begin(), f0.end(), 0.0) / n,
                      std::accumulate(f1.begin(), f1.end(), 0.0) / n,
                      std::accumulate(f2.begin(), f2.end(), 0.0) / n};
    } else {
      s.median_gd = s.mean_gd = s.median_ed = std::nan("");
      s.median_final = s.mean_final = Vec3::Constant(std::nan(""));
    }
    s.reported_endpoint_ed = euclidean_distance(s.entry.start, s.entry.reported_final);
    s.reported_ed_inconsistent =
        std::abs(s.reported_endpoint_ed - s.entry.reported_ed) > kReportedEdRelTolerance * s.reported_endpoint_ed;
    if (s.reported_ed_inconsistent) {
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "row %d: reported E.D. %.3f does not match the reported endpoints (recomputed %.3f)", row + 1,
                    s.entry.reported_ed, s.reported_endpoint_ed);
      result.notes.emplace_back(buf);
    }
    result.summaries.push_back(s);
  }
  return result;
}

}  // namespace gmrfgeo
