#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecae/config.hpp"
#include "ecae/io.hpp"

namespace ecae {

struct AnalysisSummary {
  Classification classification = Classification::Steady;
  double D = 0.0;
  std::optional<double> dominant_frequency;
  double dominant_energy_share = 0.0;
  double h_median = 0.0;
  double hb_over_h_median = 0.0;
  int n_sections = 0;
  double window_lo = 0.0, window_hi = 0.0;
  double top_locus_range_rel = 0.0;     // locus range / window length
  double bottom_locus_range_rel = 0.0;
  std::optional<double> top_recurrence_period;
  std::optional<double> bottom_recurrence_period;
};

// Re-runs all post-processing for a stored snapshot sequence and writes
// analysis/*.csv, *.svg and summary.json under out_dir.
AnalysisSummary analyze_run(const RunConfig& cfg, const SnapshotSource& snaps,
                            const std::string& out_dir);

// Executes one extrusion and its analysis; returns the summary.
AnalysisSummary cmd_run(const RunConfig& cfg, const std::string& out_dir);

AnalysisSummary cmd_analyze(const std::string& run_dir);

struct SweepCaseResult {
  std::string name;
  double value = 0.0;
  bool ok = false;
  std::string error;
  AnalysisSummary summary;
};

struct SweepResult {
  std::vector<SweepCaseResult> cases;
  int n_failed = 0;
};

SweepResult cmd_sweep(const SweepSpec& spec, const std::string& out_dir, int parallel = 1);

struct ConvergeResult {
  ConvergenceReport report;
  bool sizes_reordered = false;
  std::vector<double> sizes;  // as executed, coarse to fine
};

ConvergeResult cmd_converge(const RunConfig& base, std::vector<double> sizes,
                            const std::string& out_dir);

void cmd_geometry_dump(const RunConfig& cfg, const std::string& out_csv);
void cmd_mesh_dump(const RunConfig& cfg, const std::string& nodes_csv,
                   const std::string& elems_csv);

}  // namespace ecae
