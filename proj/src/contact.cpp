#include "ecae/contact.hpp"

#include <omp.h>

namespace ecae {

ContactResult contact_forces(const std::vector<int>& candidate_nodes,
                             const std::vector<Vec2>& coords, const DieBoundary& die,
                             const ContactParams& params, double element_size,
                             int n_threads) {
  params.validate();
  const int n = int(candidate_nodes.size());
  std::vector<SignedDistanceResult> queries(n);
  if (n_threads <= 0) n_threads = omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(n_threads)
  for (int i = 0; i < n; ++i) queries[i] = die.signed_distance(coords[candidate_nodes[i]]);

  ContactResult out;
  out.forces = Eigen::VectorXd::Zero(2 * Eigen::Index(coords.size()));
  const double k = params.penalty_stiffness;
  for (int i = 0; i < n; ++i) {
    const SignedDistanceResult& q = queries[i];
    if (q.distance >= params.activation_tolerance) continue;
    NodeContact c;
    c.node = candidate_nodes[i];
    c.gap = q.distance;
    c.wall = q.nearest_wall;
    c.normal = q.normal;
    c.active = q.distance < 0.0;
    if (c.active) {
      const double g = q.distance;
      c.normal_force = -k * g;
      out.forces[2 * c.node] += c.normal_force * q.normal.x;
      out.forces[2 * c.node + 1] += c.normal_force * q.normal.y;
      // K += k n n^T + k g hess (I - n n^T)
      const double nx = q.normal.x, ny = q.normal.y;
      const double hc = k * g * q.hess_coeff;
      const double kxx = k * nx * nx + hc * (1.0 - nx * nx);
      const double kyy = k * ny * ny + hc * (1.0 - ny * ny);
      const double kxy = k * nx * ny - hc * nx * ny;
      out.stiffness.emplace_back(2 * c.node, 2 * c.node, kxx);
      out.stiffness.emplace_back(2 * c.node + 1, 2 * c.node + 1, kyy);
      out.stiffness.emplace_back(2 * c.node, 2 * c.node + 1, kxy);
      out.stiffness.emplace_back(2 * c.node + 1, 2 * c.node, kxy);
      ++out.n_active;
      if (-g > 0.1 * element_size) ++out.deep_penetration_count;
      if (g < out.worst_gap) out.worst_gap = g;
    }
    out.candidates.push_back(c);
  }
  return out;
}

}  // namespace ecae
