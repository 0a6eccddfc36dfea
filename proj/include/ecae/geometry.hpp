#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ecae/vec2.hpp"

namespace ecae {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rigid die with two perpendicular channels joined by filleted corners.
// Frame convention: the inlet channel runs along -y (the punch moves
// downward), the exit channel along +x. The sharp outer corner of the
// channel void sits at the origin.
//
// All lengths except W1 are normalized by W1. ER = W2/W1.
struct DieProfile {
  double W1 = 0.025;  // inlet channel width [m]
  double ER = 0.75;   // exit/inlet width ratio, W2 = ER*W1
  double L1n = 22.0;  // inlet channel length / W1
  double L2n = 6.0;   // exit channel length / W1
  double R1n = 0.8;   // right-wall corner radius / W1
  double R2n = 1.8;   // left-wall corner radius / W1
  double psi_deg = 90.0;
  double phi_deg = 90.0;
  // Default assignment puts R1 on the inner (right-wall) corner and R2 on
  // the outer (left-wall) corner; set to true to exchange them.
  bool swap_fillets = false;

  double W2() const { return ER * W1; }
  double L1() const { return L1n * W1; }
  double L2() const { return L2n * W1; }
  double R1() const { return R1n * W1; }
  double R2() const { return R2n * W1; }
  double inner_radius() const { return swap_fillets ? R2() : R1(); }
  double outer_radius() const { return swap_fillets ? R1() : R2(); }

  void validate() const;
};

enum class WallId { InletLeft, InletRight, R1Fillet, R2Fillet, ExitTop, ExitBottom };

const char* wall_name(WallId id);

struct WallPrimitive {
  enum class Kind { Line, Arc } kind = Kind::Line;
  // Line: a -> b with constant into-void normal.
  Vec2 a, b;
  Vec2 line_normal;
  // Arc: center/radius, angles in radians, traversed ang0 -> ang1 (ang0 < ang1).
  // normal_sign = +1 if the into-void normal points away from the center,
  // -1 if it points toward the center.
  Vec2 center;
  double radius = 0.0;
  double ang0 = 0.0, ang1 = 0.0;
  double normal_sign = 1.0;

  Vec2 point_at(double t) const;  // t in [0,1]
};

struct DieWall {
  WallId id;
  std::vector<WallPrimitive> segments;  // empty for a degenerate zero-radius fillet
};

std::vector<DieWall> build_die(const DieProfile& profile);

struct SignedDistanceResult {
  double distance = 0.0;   // >= 0 in the channel void, < 0 inside die material
  WallId nearest_wall = WallId::InletLeft;
  Vec2 normal;             // unit, points from the wall into the channel void
  Vec2 closest_point;
  // Hessian of the signed distance: grad^2 d = hess_coeff * (I - n n^T).
  // Zero against flat wall interiors, kappa/(1 + kappa*d) on arcs, 1/d in
  // endpoint regions.
  double hess_coeff = 0.0;
};

// Query object over the walls; immutable after construction and safe to
// share across threads.
class DieBoundary {
 public:
  explicit DieBoundary(const DieProfile& profile);

  const DieProfile& profile() const { return profile_; }
  const std::vector<DieWall>& walls() const { return walls_; }

  bool inside_material(const Vec2& p) const;
  SignedDistanceResult signed_distance(const Vec2& p) const;

  Vec2 outer_center() const { return outer_center_; }
  Vec2 inner_center() const { return inner_center_; }

 private:
  DieProfile profile_;
  std::vector<DieWall> walls_;
  double w1_, w2_, l1_, l2_, ri_, ro_;
  Vec2 inner_center_, outer_center_;
};

// Boundary as a dense polyline for plotting / CSV dumps.
// Returns per-wall point chains in wall order.
std::vector<std::pair<WallId, std::vector<Vec2>>> boundary_polyline(
    const std::vector<DieWall>& walls, int arc_samples = 64);

}  // namespace ecae
