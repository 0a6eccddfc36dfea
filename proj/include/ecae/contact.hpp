#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "ecae/geometry.hpp"
#include "ecae/mesh.hpp"

namespace ecae {

struct ContactParams {
  double penalty_stiffness = 0.0;     // N/m^2 per unit thickness; 0 = derive from material
  double activation_tolerance = 0.0;  // m; gap below which a node is tracked

  void validate() const {
    if (!(penalty_stiffness > 0.0))
      throw std::runtime_error("contact: penalty_stiffness must be positive");
    if (!(activation_tolerance > 0.0))
      throw std::runtime_error("contact: activation_tolerance must be positive");
  }
};

struct NodeContact {
  int node = -1;
  double gap = 0.0;           // signed distance, < 0 when penetrated
  bool active = false;        // gap < 0
  double normal_force = 0.0;  // N per unit thickness, >= 0 (no adhesion)
  WallId wall = WallId::InletLeft;
  Vec2 normal;                // into-void wall normal at the closest point
};

struct ContactResult {
  std::vector<NodeContact> candidates;  // gap < activation_tolerance, ascending node id
  Eigen::VectorXd forces;               // nodal contact forces (push into the void)
  std::vector<Eigen::Triplet<double>> stiffness;  // contribution to the global tangent
  int n_active = 0;
  int deep_penetration_count = 0;
  double worst_gap = 0.0;  // most negative gap seen
};

// Frictionless node-to-rigid-boundary penalty contact. For a penetrated
// node the force is -k*g along the into-void normal; the tangent gets
// k*(n n^T) plus the wall-curvature term k*g*hess*(I - n n^T), which is the
// exact Hessian of the penalty energy away from feature transitions.
ContactResult contact_forces(const std::vector<int>& candidate_nodes,
                             const std::vector<Vec2>& coords, const DieBoundary& die,
                             const ContactParams& params, double element_size,
                             int n_threads = 0);

}  // namespace ecae
