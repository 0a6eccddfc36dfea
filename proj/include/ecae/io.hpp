#pragma once

#include <string>
#include <vector>

#include "ecae/config.hpp"
#include "ecae/postproc.hpp"
#include "ecae/solver.hpp"

namespace ecae {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Run directory layout:
//   config.json            echoed configuration (defaults filled in)
//   meta.json              schema version and deterministic run statistics
//   snapshots/index.csv    idx,time,phase,increment,file
//   snapshots/snap_XXXXXX.bin
//   analysis/*.csv, *.svg, summary.json
class RunWriter : public SnapshotSink {
 public:
  RunWriter(std::string dir, const RunConfig& cfg);
  void on_snapshot(const FieldSnapshot& s) override;
  void finalize(const RunStats& stats);
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  int next_ = 0;
  std::vector<std::string> index_lines_;
};

class RunReader : public SnapshotSource {
 public:
  explicit RunReader(std::string dir);
  const RunConfig& config() const { return cfg_; }
  int count() const override { return int(entries_.size()); }
  FieldSnapshot load(int i) const override;
  double time_of(int i) const { return entries_[i].time; }
  Phase phase_of(int i) const { return entries_[i].phase; }
  const std::string& dir() const { return dir_; }

 private:
  struct Entry {
    double time;
    Phase phase;
    int increment;
    std::string file;
  };
  std::string dir_;
  RunConfig cfg_;
  std::vector<Entry> entries_;
};

void write_snapshot_file(const FieldSnapshot& s, const std::string& path);
FieldSnapshot read_snapshot_file(const std::string& path);

// CSV emitters (documented column order, '%.17g' floats).
void write_sections_csv(const std::vector<SectionProfile>& sections, const std::string& path);
void write_curve_csv(const OscillationReport& rep, const std::string& path);
void write_spectrum_csv(const OscillationReport& rep, const std::string& path);
void write_trace_csv(const ContactTrace& tr, const std::string& path);
void write_convergence_csv(const ConvergenceReport& rep, const std::string& path);
void write_mesh_csv(const Mesh& mesh, const std::string& nodes_path,
                    const std::string& elems_path);
void write_boundary_csv(const std::vector<DieWall>& walls, const std::string& path);

// Minimal static SVG line plot; one polyline per series.
struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};
void write_svg_plot(const std::vector<PlotSeries>& series, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::string& path);

void ensure_dir(const std::string& path);

}  // namespace ecae
