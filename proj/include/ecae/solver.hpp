#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <optional>
#include <vector>

#include "ecae/assembly.hpp"
#include "ecae/contact.hpp"
#include "ecae/geometry.hpp"
#include "ecae/material.hpp"
#include "ecae/mesh.hpp"

namespace ecae {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Phase { PunchPush = 0, ArcPush = 1, PullOut = 2, Unload = 3, Done = 4 };

const char* phase_name(Phase p);

// Three-phase loading program: the punch feeds the billet down the inlet
// channel, left-face nodes are carried around the bend on circular arcs at
// the feed rate, and the extrudate is slid clear of the die under a small
// traction before the final load-free equilibrium.
struct LoadSchedule {
  double punch_speed = 0.005;          // m/s
  double pullout_peak_traction = 4e5;  // Pa
  double pullout_ramp = 2.0;           // s, linear ramp to peak
  double pullout_max_travel = 0.0;     // m; 0 = derive from geometry
  int snapshot_every_dense = 1;
  int snapshot_every_sparse = 10;

  void validate() const {
    if (!(punch_speed > 0.0)) throw SolverError("schedule: punch_speed must be positive");
    if (pullout_peak_traction < 0.0 || pullout_ramp <= 0.0)
      throw SolverError("schedule: invalid pull-out parameters");
    if (snapshot_every_dense < 1 || snapshot_every_sparse < 1)
      throw SolverError("schedule: snapshot cadence must be >= 1");
  }
};

struct SolveConfig {
  double newton_tol_force = 1e-6;  // relative residual norm
  double newton_tol_disp = 1e-8;   // relative displacement correction
  int max_newton_iters = 25;
  int max_step_cuts = 10;
  bool line_search = true;
  double feed_per_increment_rel = 0.25;  // feed distance per increment / element size
  double regularization_rel = 1e-10;     // weak-spring stiffness / (E/element size)
  int n_threads = 0;                     // 0 = library default

  void validate() const {
    if (!(newton_tol_force > 0.0 && newton_tol_force <= 1e-2) ||
        !(newton_tol_disp > 0.0 && newton_tol_disp <= 1e-2))
      throw SolverError("solve: newton tolerances must be in (0, 1e-2]");
    if (max_newton_iters < 5) throw SolverError("solve: max_newton_iters must be >= 5");
    if (max_step_cuts < 0) throw SolverError("solve: max_step_cuts must be >= 0");
    if (!(feed_per_increment_rel > 0.0 && feed_per_increment_rel <= 2.0))
      throw SolverError("solve: feed_per_increment_rel must be in (0, 2]");
  }
};

struct FieldSnapshot {
  double time = 0.0;
  Phase phase = Phase::PunchPush;
  int increment = 0;
  double punch_travel = 0.0;
  std::vector<Vec2> coords;
  std::vector<ElementState> states;
  std::vector<NodeContact> contact;
};

class SnapshotSink {
 public:
  virtual ~SnapshotSink() = default;
  virtual void on_snapshot(const FieldSnapshot&) = 0;
};

class VectorSink : public SnapshotSink {
 public:
  void on_snapshot(const FieldSnapshot& s) override { snaps.push_back(s); }
  std::vector<FieldSnapshot> snaps;
};

// Random access to a stored snapshot sequence; lets analyses stream a run
// from disk without holding every snapshot in memory.
class SnapshotSource {
 public:
  virtual ~SnapshotSource() = default;
  virtual int count() const = 0;
  virtual FieldSnapshot load(int i) const = 0;
};

class VectorSource : public SnapshotSource {
 public:
  explicit VectorSource(const std::vector<FieldSnapshot>& snaps) : snaps_(snaps) {}
  int count() const override { return int(snaps_.size()); }
  FieldSnapshot load(int i) const override { return snaps_[i]; }

 private:
  const std::vector<FieldSnapshot>& snaps_;
};

// ---------------------------------------------------------------------------
// Reusable quasi-static increment core.

// Direct sparse solve of K delta = -r. Reports a near-singular factorization
// together with the dof owning the smallest diagonal pivot magnitude.
struct NewtonStepInfo {
  bool ok = true;
  int near_zero_dof = -1;
};
NewtonStepInfo newton_step(const Eigen::SparseMatrix<double>& K_ff, const Eigen::VectorXd& r_f,
                           Eigen::VectorXd& delta);

struct IncrementInputs {
  const Mesh* mesh = nullptr;
  const DieBoundary* die = nullptr;            // optional rigid-boundary contact
  const ContactParams* contact = nullptr;      // required when die is set
  const std::vector<int>* contact_nodes = nullptr;
  MaterialParams material;
  ElementFormulation formulation;
  SolveConfig solve;
  std::vector<std::pair<int, double>> prescribed;  // dof -> target coordinate
  Eigen::VectorXd f_ext;                           // external nodal forces (optional)
};

struct IncrementOutcome {
  bool converged = false;
  int iters = 0;
  double resid_rel = 0.0;
  std::vector<double> resid_history;  // relative residual per iteration
  int singular_dof = -1;
  std::vector<Vec2> coords;
  std::vector<ElementState> states;
  ContactResult contact;
};

IncrementOutcome solve_increment(const IncrementInputs& in, const std::vector<Vec2>& coords_n,
                                 const std::vector<ElementState>& states_n);

// ---------------------------------------------------------------------------
// Full single-pass extrusion driver.

struct RunInputs {
  const Mesh* mesh = nullptr;
  const DieBoundary* die = nullptr;
  MaterialParams material;
  ElementFormulation formulation;
  LoadSchedule schedule;
  SolveConfig solve;
  ContactParams contact;
  Vec2 billet_origin;  // die-frame position of the billet-local origin
};

struct RunStats {
  int increments = 0;
  int step_cuts = 0;
  int newton_iterations = 0;
  int snapshots = 0;
  bool pullout_capped = false;
  double end_time = 0.0;
  double final_penalty = 0.0;
};

// Advances pseudo-time through PunchPush -> ArcPush -> PullOut -> Unload and
// returns the final load-free snapshot carrying the residual stresses.
FieldSnapshot run_extrusion(const RunInputs& in, SnapshotSink* sink = nullptr,
                            RunStats* stats = nullptr);

// Phase targets for the prescribed-motion interface; exposed for tests.
// Punch: vertical coordinate of a top-face node after elapsed phase time.
double punch_target_y(double y_at_phase_start, double punch_speed, double elapsed);

// Arc feed: position of a left-face node whose path was captured at
// (x_hold, y_start) with arc radius r about the bend center, after feed
// distance s. Returns nullopt once the node has cleared the bend.
std::optional<Vec2> arc_feed_target(const Vec2& bend_center, double outer_radius, double x_hold,
                                    double y_start, double r, double s);

}  // namespace ecae
