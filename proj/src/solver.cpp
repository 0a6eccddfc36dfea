#include "ecae/solver.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ecae {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kArcEnd = 1.5 * kPi;
}  // namespace

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::PunchPush: return "PunchPush";
    case Phase::ArcPush: return "ArcPush";
    case Phase::PullOut: return "PullOut";
    case Phase::Unload: return "Unload";
    case Phase::Done: return "Done";
  }
  return "?";
}

NewtonStepInfo newton_step(const Eigen::SparseMatrix<double>& K_ff, const Eigen::VectorXd& r_f,
                           Eigen::VectorXd& delta) {
  NewtonStepInfo info;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(K_ff);
  lu.factorize(K_ff);
  if (lu.info() != Eigen::Success) {
    info.ok = false;
    double dmin = std::numeric_limits<double>::max();
    for (int d = 0; d < K_ff.outerSize(); ++d) {
      const double v = std::abs(K_ff.coeff(d, d));
      if (v < dmin) {
        dmin = v;
        info.near_zero_dof = d;
      }
    }
    return info;
  }
  delta = lu.solve(-r_f);
  if (!delta.allFinite()) {
    info.ok = false;
    info.near_zero_dof = -1;
  }
  return info;
}

double punch_target_y(double y_at_phase_start, double punch_speed, double elapsed) {
  return y_at_phase_start - punch_speed * elapsed;
}

std::optional<Vec2> arc_feed_target(const Vec2& bend_center, double outer_radius, double x_hold,
                                    double y_start, double r, double s) {
  const double straight = y_start - bend_center.y;  // descent before the tangent level
  if (s <= straight || outer_radius <= 0.0) {
    if (s >= straight && outer_radius <= 0.0) return std::nullopt;
    return Vec2{x_hold, y_start - s};
  }
  const double theta = kPi + (s - straight) / outer_radius;
  if (theta >= kArcEnd) return std::nullopt;
  return bend_center + Vec2{r * std::cos(theta), r * std::sin(theta)};
}

// ---------------------------------------------------------------------------

namespace {

struct ResidualEval {
  Eigen::VectorXd r;        // full residual
  Eigen::VectorXd r_free;   // gathered over free dofs
  double scale = 0.0;
  double rel = 0.0;
};

struct WorkState {
  const IncrementInputs* in = nullptr;
  const std::vector<Vec2>* coords_n = nullptr;
  std::vector<char> fixed;
  std::vector<int> free_of_dof;
  int n_free = 0;
  double k_spring = 0.0;
  double abs_floor = 0.0;
};

// Residual r = f_int + f_spring - f_contact - f_ext, with the weak
// regularization springs anchored at the increment-start coordinates.
ResidualEval eval_residual(const WorkState& w, const Eigen::VectorXd& f_int,
                           const Eigen::VectorXd& f_char, const ContactResult& cr,
                           const std::vector<Vec2>& trial) {
  const auto& in = *w.in;
  const int ndof = int(f_int.size());
  ResidualEval ev;
  ev.r = f_int - cr.forces;
  if (in.f_ext.size() == ndof) ev.r -= in.f_ext;
  for (int i = 0; i < ndof / 2; ++i) {
    ev.r[2 * i] += w.k_spring * (trial[i].x - (*w.coords_n)[i].x);
    ev.r[2 * i + 1] += w.k_spring * (trial[i].y - (*w.coords_n)[i].y);
  }
  ev.r_free.resize(w.n_free);
  double char_sq = 0.0, load_sq = 0.0;
  for (int d = 0; d < ndof; ++d) {
    if (w.free_of_dof[d] < 0) continue;
    ev.r_free[w.free_of_dof[d]] = ev.r[d];
    char_sq += f_char[d] * f_char[d];
    double load = cr.forces[d];
    if (in.f_ext.size() == ndof) load += in.f_ext[d];
    load_sq += load * load;
  }
  ev.scale = std::max({std::sqrt(char_sq), std::sqrt(load_sq), w.abs_floor});
  ev.rel = ev.r_free.norm() / ev.scale;
  return ev;
}

ContactResult eval_contact(const IncrementInputs& in, const std::vector<Vec2>& coords) {
  if (in.die && in.contact && in.contact_nodes)
    return contact_forces(*in.contact_nodes, coords, *in.die, *in.contact,
                          in.mesh->element_size(), in.solve.n_threads);
  ContactResult none;
  none.forces = Eigen::VectorXd::Zero(2 * Eigen::Index(coords.size()));
  return none;
}

}  // namespace

IncrementOutcome solve_increment(const IncrementInputs& in, const std::vector<Vec2>& coords_n,
                                 const std::vector<ElementState>& states_n) {
  const Mesh& mesh = *in.mesh;
  const int ndof = 2 * mesh.n_nodes();

  WorkState w;
  w.in = &in;
  w.coords_n = &coords_n;
  w.fixed.assign(ndof, 0);
  std::vector<Vec2> trial = coords_n;
  for (const auto& [dof, val] : in.prescribed) {
    w.fixed[dof] = 1;
    if (dof % 2)
      trial[dof / 2].y = val;
    else
      trial[dof / 2].x = val;
  }
  w.free_of_dof.assign(ndof, -1);
  for (int d = 0; d < ndof; ++d)
    if (!w.fixed[d]) w.free_of_dof[d] = w.n_free++;
  w.k_spring = in.solve.regularization_rel * in.material.E / mesh.element_size();
  w.abs_floor = 1e-12 * in.material.E * mesh.element_size();

  IncrementOutcome out;
  bool disp_ok = true;  // no correction yet

  for (int it = 0;; ++it) {
    GlobalSystem sys;
    try {
      sys = assemble(mesh, coords_n, trial, states_n, in.material, in.formulation,
                     in.solve.n_threads);
    } catch (const AssemblyError&) {
      out.converged = false;
      return out;
    }
    ContactResult cr = eval_contact(in, trial);
    ResidualEval ev = eval_residual(w, sys.f_int, sys.f_char, cr, trial);
    out.iters = it;
    out.resid_rel = ev.rel;
    out.resid_history.push_back(ev.rel);

    if (ev.rel < in.solve.newton_tol_force && disp_ok) {
      out.converged = true;
      out.coords = trial;
      out.states = std::move(sys.states_trial);
      out.contact = std::move(cr);
      return out;
    }
    if (it >= in.solve.max_newton_iters) {
      out.converged = false;
      return out;
    }

    // Reduced tangent: internal + contact + springs.
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(size_t(sys.tangent.nonZeros()) + cr.stiffness.size() + w.n_free);
    for (int col = 0; col < sys.tangent.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator itr(sys.tangent, col); itr; ++itr) {
        const int fi = w.free_of_dof[itr.row()], fj = w.free_of_dof[itr.col()];
        if (fi >= 0 && fj >= 0) trips.emplace_back(fi, fj, itr.value());
      }
    for (const auto& t : cr.stiffness) {
      const int fi = w.free_of_dof[t.row()], fj = w.free_of_dof[t.col()];
      if (fi >= 0 && fj >= 0) trips.emplace_back(fi, fj, t.value());
    }
    for (int d = 0; d < ndof; ++d)
      if (w.free_of_dof[d] >= 0)
        trips.emplace_back(w.free_of_dof[d], w.free_of_dof[d], w.k_spring);
    Eigen::SparseMatrix<double> K_ff(w.n_free, w.n_free);
    K_ff.setFromTriplets(trips.begin(), trips.end());

    Eigen::VectorXd delta;
    const NewtonStepInfo step = newton_step(K_ff, ev.r_free, delta);
    if (!step.ok) {
      out.converged = false;
      out.singular_dof = step.near_zero_dof;
      return out;
    }

    // Backtracking line search on the residual norm.
    const int n_back = in.solve.line_search ? 5 : 0;
    double best_alpha = 1.0;
    double best_norm = std::numeric_limits<double>::max();
    std::vector<Vec2> cand = trial;
    for (int ls = 0;; ++ls) {
      const double alpha = std::ldexp(1.0, -ls);  // 1, 1/2, 1/4, ...
      for (int d = 0; d < ndof; ++d)
        if (w.free_of_dof[d] >= 0) {
          const double v = (d % 2 ? trial[d / 2].y : trial[d / 2].x) +
                           alpha * delta[w.free_of_dof[d]];
          if (d % 2)
            cand[d / 2].y = v;
          else
            cand[d / 2].x = v;
        }
      double rn = std::numeric_limits<double>::max();
      try {
        ResidualOnly ro = assemble_residual(mesh, coords_n, cand, states_n, in.material,
                                            in.formulation, in.solve.n_threads);
        ContactResult crc = eval_contact(in, cand);
        rn = eval_residual(w, ro.f_int, ro.f_char, crc, cand).rel;
      } catch (const AssemblyError&) {
        rn = std::numeric_limits<double>::max();  // inverted trial, reject this alpha
      }
      if (rn < best_norm) {
        best_norm = rn;
        best_alpha = alpha;
      }
      if (rn < ev.rel || ls >= n_back) break;
    }
    if (!std::isfinite(best_norm)) {
      out.converged = false;
      return out;
    }
    double corr_sq = 0.0;
    for (int d = 0; d < ndof; ++d)
      if (w.free_of_dof[d] >= 0) {
        const double v = (d % 2 ? trial[d / 2].y : trial[d / 2].x) +
                         best_alpha * delta[w.free_of_dof[d]];
        if (d % 2)
          trial[d / 2].y = v;
        else
          trial[d / 2].x = v;
        corr_sq += best_alpha * delta[w.free_of_dof[d]] * best_alpha *
                   delta[w.free_of_dof[d]];
      }
    double inc_sq = 0.0;
    for (int i = 0; i < mesh.n_nodes(); ++i)
      inc_sq += (trial[i] - coords_n[i]).squared_norm();
    const double inc_scale = std::max(std::sqrt(inc_sq), 1e-16 * mesh.element_size());
    disp_ok = std::sqrt(corr_sq) < in.solve.newton_tol_disp * inc_scale;
  }
}

// ---------------------------------------------------------------------------

namespace {

struct ArcPath {
  int node = -1;
  bool done = true;
  bool on_arc = false;
  double x_hold = 0.0, y_cur = 0.0;
  double straight_left = 0.0;
  double r = 0.0;
  double theta = kPi;
};

struct PhaseContext {
  Phase phase = Phase::PunchPush;
  double t_phase = 0.0;  // elapsed time inside the phase
  double duration = 0.0; // 0 = open-ended (PullOut before detection)
  // punch
  std::vector<int> top_nodes;
  std::vector<double> top_y0;
  // arc feed
  std::vector<ArcPath> paths;
  // pull-out
  std::array<int, 2> anchors{-1, -1};
  std::array<double, 2> anchor_x0{}, anchor_y0{};
  // unload supports
  std::array<int, 2> supports{-1, -1};
};

void advance_paths(std::vector<ArcPath>& paths, double ds, double outer_radius) {
  for (ArcPath& p : paths) {
    if (p.done) continue;
    if (p.theta >= kArcEnd - 1e-12 && p.on_arc) {
      p.done = true;  // released after reaching the bend exit
      continue;
    }
    double rem = ds;
    if (!p.on_arc) {
      const double take = std::min(p.straight_left, rem);
      p.y_cur -= take;
      p.straight_left -= take;
      rem -= take;
      if (p.straight_left <= 1e-15) p.on_arc = true;
    }
    if (p.on_arc && outer_radius <= 0.0) {
      p.theta = kArcEnd;  // sharp corner: released as soon as it arrives
      p.done = true;
      continue;
    }
    if (p.on_arc && rem > 0.0)
      p.theta = std::min(p.theta + rem / outer_radius, kArcEnd);
  }
}

}  // namespace

FieldSnapshot run_extrusion(const RunInputs& in, SnapshotSink* sink, RunStats* stats) {
  const Mesh& mesh = *in.mesh;
  const DieBoundary& die = *in.die;
  in.material.validate();
  in.formulation.validate();
  in.schedule.validate();
  in.solve.validate();
  in.contact.validate();

  const DieProfile& prof = die.profile();
  const double w1 = prof.W1, w2 = prof.W2(), l2 = prof.L2();
  const double ro = prof.outer_radius(), ri = prof.inner_radius();
  const Vec2 bend_center = die.outer_center();
  const double v = in.schedule.punch_speed;
  const double elem = mesh.element_size();
  const double dt0 = in.solve.feed_per_increment_rel * elem / v;

  std::vector<Vec2> coords(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) coords[i] = mesh.nodes[i] + in.billet_origin;
  std::vector<ElementState> states(mesh.n_elems());
  const std::vector<int> bnodes = mesh.boundary_nodes();
  ContactParams contact = in.contact;
  const double penalty_cap = 1e4 * in.material.E / elem;

  RunStats local_stats;
  RunStats& st = stats ? *stats : local_stats;
  st.final_penalty = contact.penalty_stiffness;

  // Initial penetration would make the very first solve ill-posed.
  for (int n : bnodes) {
    const double d0 = die.signed_distance(coords[n]).distance;
    if (d0 < 0.0)
      throw SolverError("run: initial configuration penetrates the die at node " +
                        std::to_string(n));
  }

  PhaseContext ctx;
  ctx.phase = Phase::PunchPush;
  ctx.top_nodes = mesh.row(mesh.ny);
  for (int n : ctx.top_nodes) ctx.top_y0.push_back(coords[n].y);
  const double y_stop = std::max(ro, w2 + ri);
  const double y_top0 = ctx.top_y0.empty() ? 0.0 : ctx.top_y0.front();
  ctx.duration = std::max(0.0, (y_top0 - y_stop) / v);

  double t = 0.0;
  double dt = dt0;
  double punch_travel = 0.0;
  int increment = 0;
  bool head_in_exit = false;
  int since_snapshot = 0;
  FieldSnapshot last_snap;

  auto make_snapshot = [&](const ContactResult& cr) {
    FieldSnapshot s;
    s.time = t;
    s.phase = ctx.phase;
    s.increment = increment;
    s.punch_travel = punch_travel;
    s.coords = coords;
    s.states = states;
    s.contact = cr.candidates;
    return s;
  };

  auto emit = [&](const FieldSnapshot& s) {
    if (sink) sink->on_snapshot(s);
    ++st.snapshots;
    last_snap = s;
  };

  {
    ContactResult cr0 = contact_forces(bnodes, coords, die, contact, elem, in.solve.n_threads);
    emit(make_snapshot(cr0));
  }

  auto enter_arc_push = [&]() {
    ctx = PhaseContext{};
    ctx.phase = Phase::ArcPush;
    double t_max = 0.0;
    for (int node : mesh.column(0)) {
      const Vec2 p = coords[node];
      ArcPath path;
      path.node = node;
      if (p.y > bend_center.y) {
        path.done = false;
        path.on_arc = false;
        path.x_hold = p.x;
        path.y_cur = p.y;
        path.straight_left = p.y - bend_center.y;
        path.r = ro - p.x;
        path.theta = kPi;
        t_max = std::max(t_max, (path.straight_left + (kArcEnd - kPi) * ro) / v);
      } else if (p.x < bend_center.x && ro > 0.0) {
        const Vec2 rel = p - bend_center;
        double ang = std::atan2(rel.y, rel.x);
        if (ang < 0.0) ang += 2.0 * kPi;
        if (ang >= kPi && ang < kArcEnd) {
          path.done = false;
          path.on_arc = true;
          path.r = rel.norm();
          path.theta = ang;
          t_max = std::max(t_max, (kArcEnd - ang) * ro / v);
        }
      }
      ctx.paths.push_back(path);
    }
    ctx.duration = t_max;
  };

  auto enter_pull_out = [&]() {
    ctx = PhaseContext{};
    ctx.phase = Phase::PullOut;
    const auto left = mesh.column(0);
    ctx.anchors = {left[mesh.ny], left[mesh.ny - 1]};
    for (int k = 0; k < 2; ++k) {
      ctx.anchor_x0[k] = coords[ctx.anchors[k]].x;
      ctx.anchor_y0[k] = coords[ctx.anchors[k]].y;
    }
    double x_tail = std::numeric_limits<double>::max();
    for (const Vec2& p : coords) x_tail = std::min(x_tail, p.x);
    const double travel = in.schedule.pullout_max_travel > 0.0
                              ? in.schedule.pullout_max_travel
                              : (l2 - x_tail) + 2.0 * w1;
    ctx.duration = std::max(travel, elem) / v;
  };

  auto enter_unload = [&]() {
    ctx = PhaseContext{};
    ctx.phase = Phase::Unload;
    ctx.duration = dt0;
    const auto left = mesh.column(0);
    const int j1 = std::max(0, mesh.ny / 5);
    const int j2 = std::min(mesh.ny, mesh.ny - mesh.ny / 5);
    ctx.supports = {left[j1], left[j2 == j1 ? std::min(mesh.ny, j1 + 1) : j2]};
  };

  while (ctx.phase != Phase::Done) {
    // Phase transition on exhausted duration.
    if (ctx.t_phase >= ctx.duration - 1e-9 * dt0) {
      switch (ctx.phase) {
        case Phase::PunchPush: enter_arc_push(); continue;
        case Phase::ArcPush: enter_pull_out(); continue;
        case Phase::PullOut:
          st.pullout_capped = true;
          enter_unload();
          continue;
        case Phase::Unload: ctx.phase = Phase::Done; continue;
        default: ctx.phase = Phase::Done; continue;
      }
    }

    double dt_step = std::min(dt, ctx.duration - ctx.t_phase);

    int cuts = 0;
    while (true) {
      // Build prescribed dofs and external forces for this trial step.
      IncrementInputs inc;
      inc.mesh = &mesh;
      inc.die = &die;
      inc.contact = &contact;
      inc.contact_nodes = &bnodes;
      inc.material = in.material;
      inc.formulation = in.formulation;
      inc.solve = in.solve;

      std::vector<ArcPath> paths_trial;
      const double t_new = ctx.t_phase + dt_step;
      switch (ctx.phase) {
        case Phase::PunchPush:
          for (size_t k = 0; k < ctx.top_nodes.size(); ++k)
            inc.prescribed.push_back(
                {2 * ctx.top_nodes[k] + 1, punch_target_y(ctx.top_y0[k], v, t_new)});
          break;
        case Phase::ArcPush: {
          paths_trial = ctx.paths;
          advance_paths(paths_trial, v * dt_step, ro);
          for (const ArcPath& p : paths_trial) {
            if (p.done) continue;
            Vec2 target;
            if (!p.on_arc)
              target = {p.x_hold, p.y_cur};
            else
              target = bend_center + Vec2{p.r * std::cos(p.theta), p.r * std::sin(p.theta)};
            inc.prescribed.push_back({2 * p.node, target.x});
            inc.prescribed.push_back({2 * p.node + 1, target.y});
          }
          break;
        }
        case Phase::PullOut: {
          for (int k = 0; k < 2; ++k) {
            inc.prescribed.push_back({2 * ctx.anchors[k], ctx.anchor_x0[k] + v * t_new});
            inc.prescribed.push_back({2 * ctx.anchors[k] + 1, ctx.anchor_y0[k]});
          }
          const double trac = in.schedule.pullout_peak_traction *
                              std::min(t_new / in.schedule.pullout_ramp, 1.0);
          inc.f_ext = Eigen::VectorXd::Zero(2 * mesh.n_nodes());
          const auto right = mesh.column(mesh.nx);
          for (int j = 0; j < mesh.ny; ++j) {
            const double L = (coords[right[j + 1]] - coords[right[j]]).norm();
            inc.f_ext[2 * right[j]] += 0.5 * trac * L;
            inc.f_ext[2 * right[j + 1]] += 0.5 * trac * L;
          }
          break;
        }
        case Phase::Unload:
          inc.prescribed.push_back({2 * ctx.supports[0], coords[ctx.supports[0]].x});
          inc.prescribed.push_back({2 * ctx.supports[0] + 1, coords[ctx.supports[0]].y});
          inc.prescribed.push_back({2 * ctx.supports[1] + 1, coords[ctx.supports[1]].y});
          break;
        default: break;
      }

      IncrementOutcome out = solve_increment(inc, coords, states);
      st.newton_iterations += out.iters;
      if (out.converged) {
        coords = std::move(out.coords);
        states = std::move(out.states);
        ctx.t_phase = t_new;
        t += dt_step;
        ++increment;
        ++st.increments;
        if (ctx.phase == Phase::PunchPush) punch_travel = v * ctx.t_phase;
        if (ctx.phase == Phase::ArcPush) ctx.paths = std::move(paths_trial);

        if (!head_in_exit)
          for (const Vec2& p : coords)
            if (p.x > w1) {
              head_in_exit = true;
              break;
            }

        // Penalty escalation on deep penetration.
        if (out.contact.deep_penetration_count > 0 &&
            contact.penalty_stiffness < penalty_cap) {
          contact.penalty_stiffness =
              std::min(contact.penalty_stiffness * 10.0, penalty_cap);
          st.final_penalty = contact.penalty_stiffness;
        }

        const bool dense = head_in_exit &&
                           (ctx.phase == Phase::PunchPush || ctx.phase == Phase::ArcPush);
        const int cadence = dense ? in.schedule.snapshot_every_dense
                                  : in.schedule.snapshot_every_sparse;
        ++since_snapshot;
        const bool phase_over = ctx.t_phase >= ctx.duration - 1e-9 * dt0;
        if (since_snapshot >= cadence || phase_over || ctx.phase == Phase::Unload) {
          emit(make_snapshot(out.contact));
          since_snapshot = 0;
        }

        if (ctx.phase == Phase::PullOut && out.contact.n_active == 0) {
          enter_unload();
        } else if (ctx.phase == Phase::Unload && phase_over) {
          ctx.phase = Phase::Done;
        }
        dt = std::min(dt * 1.5, dt0);
        break;
      }

      ++cuts;
      ++st.step_cuts;
      if (cuts > in.solve.max_step_cuts) {
        std::ostringstream msg;
        msg << "run: no convergence at t=" << t << " s (phase " << phase_name(ctx.phase)
            << ", increment " << increment << ") after " << cuts - 1
            << " step cuts; last relative residual " << out.resid_rel;
        if (out.singular_dof >= 0)
          msg << "; singular tangent near reduced dof " << out.singular_dof;
        ContactResult cr = contact_forces(bnodes, coords, die, contact, elem,
                                          in.solve.n_threads);
        msg << "; deepest penetration " << cr.worst_gap << " m";
        throw SolverError(msg.str());
      }
      dt_step *= 0.5;
      dt = dt_step;
    }
  }

  st.end_time = t;
  // Final state snapshot (always emitted above on Unload); keep the last.
  FieldSnapshot final_snap = last_snap;
  final_snap.coords = coords;
  final_snap.states = states;
  final_snap.time = t;
  final_snap.increment = increment;
  final_snap.phase = Phase::Done;
  return final_snap;
}

}  // namespace ecae
