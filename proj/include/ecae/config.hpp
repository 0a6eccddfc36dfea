#pragma once

#include <string>
#include <vector>

#include "ecae/geometry.hpp"
#include "ecae/mesh.hpp"
#include "ecae/postproc.hpp"
#include "ecae/solver.hpp"

namespace ecae {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BilletConfig {
  double length = 0.55;
  double target_element_size = 0.758e-3;
  double clearance = 1e-6;
  double start_y = -1.0;  // die-frame y of the billet bottom; < 0 = just above the bend
};

struct FemConfig {
  std::string integration = "bbar";  // "bbar" | "hourglass"
  double hourglass_coefficient = 0.03;
  std::string recovery = "volume_weighted";  // | "spr"
};

struct ContactConfig {
  double penalty_rel = 100.0;           // * E / element_size
  double activation_tolerance_rel = 0.5;  // * element_size
};

struct ScheduleConfig {
  double punch_speed = 0.005;
  double pullout_peak_traction_rel = 1e-3;  // * sigma_y0
  double pullout_ramp = 2.0;
  double pullout_max_travel = 0.0;  // 0 = auto
  int snapshot_every_dense = 1;
  int snapshot_every_sparse = 10;
};

struct AnalysisConfig {
  double section_spacing = 1e-3;
  double trim_rel = 1.5;          // * W1 trimmed at head and tail
  double d_threshold_rel = 0.02;  // * sigma_y0
  double window_lo = 0.0;         // die-frame x; both zero = derive from geometry
  double window_hi = 0.0;
  double ab_a_rel[2] = {0.2, 0.5};  // material line endpoints, fractions of (width, length)
  double ab_b_rel[2] = {0.8, 0.5};
};

// Fully deterministic run description; every field has a documented default
// and the echoed form embeds in each output directory.
struct RunConfig {
  DieProfile die;
  BilletConfig billet;
  MaterialParams material;
  ScheduleConfig schedule;
  SolveConfig solve;
  FemConfig fem;
  ContactConfig contact;
  AnalysisConfig analysis;

  void validate() const;

  double billet_width() const { return die.W1 - 2.0 * billet.clearance; }
  BilletSpec billet_spec() const;
  Vec2 billet_origin() const;
  ElementFormulation formulation() const;
  RecoveryMethod recovery_method() const;
  ContactParams contact_params() const;
  LoadSchedule load_schedule() const;
  SectionParams section_params() const;
  OscillationParams oscillation_params() const;
  TraceParams trace_params() const;  // window only; time range open
  Vec2 material_line_a() const;
  Vec2 material_line_b() const;
};

RunConfig parse_config(const std::string& json_text);
std::string serialize_config(const RunConfig& cfg);  // canonical, round-trips
RunConfig load_config_file(const std::string& path);
void save_config_file(const RunConfig& cfg, const std::string& path);

// Desk-scale presets: "smoke" (2 mm elements, 10 W1 billet),
// "fine" (1 mm, 10 W1), "paper" (0.758 mm, 22 W1; long-running).
RunConfig preset_config(const std::string& name);

struct SweepSpec {
  RunConfig base;
  enum class Axis { ER, HardeningRate } axis = Axis::ER;
  std::vector<double> values;

  void validate() const;
  RunConfig case_config(double value) const;
  std::string case_name(int index) const;
};

SweepSpec parse_sweep(const std::string& json_text);
SweepSpec load_sweep_file(const std::string& path);

}  // namespace ecae
