#include "ecae/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ecae {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}
}  // namespace

const char* wall_name(WallId id) {
  switch (id) {
    case WallId::InletLeft: return "InletLeft";
    case WallId::InletRight: return "InletRight";
    case WallId::R1Fillet: return "R1Fillet";
    case WallId::R2Fillet: return "R2Fillet";
    case WallId::ExitTop: return "ExitTop";
    case WallId::ExitBottom: return "ExitBottom";
  }
  return "?";
}

void DieProfile::validate() const {
  if (!(W1 > 0.0)) throw GeometryError("die: W1 must be positive");
  if (!(ER > 0.0 && ER <= 1.0)) throw GeometryError("die: ER must be in (0, 1]");
  if (!(L1n > 0.0 && L2n > 0.0)) throw GeometryError("die: channel lengths must be positive");
  if (R1n < 0.0 || R2n < 0.0) throw GeometryError("die: corner radii must be non-negative");
  if (psi_deg != 90.0 || phi_deg != 90.0)
    throw GeometryError("die: only psi = phi = 90 degrees is supported");
}

Vec2 WallPrimitive::point_at(double t) const {
  if (kind == Kind::Line) return a + (b - a) * t;
  const double ang = ang0 + (ang1 - ang0) * t;
  return center + Vec2{radius * std::cos(ang), radius * std::sin(ang)};
}

std::vector<DieWall> build_die(const DieProfile& p) {
  p.validate();
  const double w1 = p.W1, w2 = p.W2(), l1 = p.L1(), l2 = p.L2();
  const double ri = p.inner_radius(), ro = p.outer_radius();
  const Vec2 ci{w1 + ri, w2 + ri};  // inner fillet center (in die material)
  const Vec2 co{ro, ro};            // outer fillet center (in channel void)

  // Fillet tangent points must land on their adjoining walls.
  if (ro > l1 || ro > l2)
    throw GeometryError("die: outer fillet radius " + fmt(ro) +
                        " exceeds a channel length; fillet overlaps a wall");
  if (w2 + ri > l1 || w1 + ri > l2)
    throw GeometryError("die: inner fillet radius " + fmt(ri) +
                        " extends past a channel end; fillet overlaps a wall");

  // The inner-corner material must stay clear of the outer fillet fill,
  // otherwise the channel is pinched shut. Sample the inner boundary.
  if (ro > 0.0) {
    const int n = 128;
    for (int k = 0; k <= n; ++k) {
      Vec2 q;
      if (ri > 0.0) {
        const double ang = kPi + 0.5 * kPi * k / n;
        q = ci + Vec2{ri * std::cos(ang), ri * std::sin(ang)};
      } else {
        q = {w1, w2};
      }
      const bool in_fill = q.x >= 0.0 && q.y >= 0.0 && q.x <= ro && q.y <= ro &&
                           (q - co).norm() >= ro;
      if (in_fill)
        throw GeometryError("die: fillet arcs overlap; channel is pinched shut (ER=" +
                            fmt(p.ER) + ", R1n=" + fmt(p.R1n) + ", R2n=" + fmt(p.R2n) + ")");
      if (ri == 0.0) break;
    }
  }

  const WallId inner_id = p.swap_fillets ? WallId::R2Fillet : WallId::R1Fillet;
  const WallId outer_id = p.swap_fillets ? WallId::R1Fillet : WallId::R2Fillet;

  auto line = [](Vec2 a, Vec2 b, Vec2 n) {
    WallPrimitive s;
    s.kind = WallPrimitive::Kind::Line;
    s.a = a;
    s.b = b;
    s.line_normal = n;
    return s;
  };
  auto arc = [](Vec2 c, double r, double a0, double a1, double sign) {
    WallPrimitive s;
    s.kind = WallPrimitive::Kind::Arc;
    s.center = c;
    s.radius = r;
    s.ang0 = a0;
    s.ang1 = a1;
    s.normal_sign = sign;
    return s;
  };

  // Walls in boundary-traversal order starting at the inlet top left.
  std::vector<DieWall> walls;
  walls.push_back({WallId::InletLeft, {line({0.0, l1}, {0.0, ro}, {1.0, 0.0})}});
  {
    DieWall w{outer_id, {}};
    if (ro > 0.0) w.segments.push_back(arc(co, ro, kPi, 1.5 * kPi, -1.0));
    walls.push_back(w);
  }
  walls.push_back({WallId::ExitBottom, {line({ro, 0.0}, {l2, 0.0}, {0.0, 1.0})}});
  walls.push_back({WallId::ExitTop, {line({l2, w2}, {w1 + ri, w2}, {0.0, -1.0})}});
  {
    DieWall w{inner_id, {}};
    if (ri > 0.0) w.segments.push_back(arc(ci, ri, kPi, 1.5 * kPi, +1.0));
    walls.push_back(w);
  }
  walls.push_back({WallId::InletRight, {line({w1, w2 + ri}, {w1, l1}, {-1.0, 0.0})}});
  return walls;
}

DieBoundary::DieBoundary(const DieProfile& profile)
    : profile_(profile), walls_(build_die(profile)) {
  w1_ = profile.W1;
  w2_ = profile.W2();
  l1_ = profile.L1();
  l2_ = profile.L2();
  ri_ = profile.inner_radius();
  ro_ = profile.outer_radius();
  inner_center_ = {w1_ + ri_, w2_ + ri_};
  outer_center_ = {ro_, ro_};
}

bool DieBoundary::inside_material(const Vec2& p) const {
  // Inner die block between the channels, with the fillet trimming its tip.
  if (p.x >= w1_ && p.x <= l2_ && p.y >= w2_ && p.y <= l1_) {
    const bool in_trim = p.x < w1_ + ri_ && p.y < w2_ + ri_ &&
                         (p - inner_center_).norm() > ri_;
    return !in_trim;
  }
  // Outer die blocks along the left and bottom walls.
  if (p.x <= 0.0 && p.y <= l1_) return true;
  if (p.y <= 0.0 && p.x <= l2_) return true;
  // Outer fillet fill in the corner quadrant.
  if (p.x >= 0.0 && p.y >= 0.0 && p.x <= ro_ && p.y <= ro_ &&
      (p - outer_center_).norm() >= ro_)
    return true;
  return false;
}

namespace {

struct PrimHit {
  double dist2 = std::numeric_limits<double>::max();
  Vec2 closest;
  Vec2 surf_normal;       // into-void normal of the primitive at the closest point
  bool interior = false;  // projection landed inside the primitive
  double kappa0 = 0.0;    // boundary curvature at the closest point (into-void sign)
};

PrimHit closest_on_line(const WallPrimitive& s, const Vec2& p) {
  PrimHit h;
  const Vec2 ab = s.b - s.a;
  const double len2 = ab.squared_norm();
  double t = len2 > 0.0 ? (p - s.a).dot(ab) / len2 : 0.0;
  h.interior = t > 0.0 && t < 1.0;
  t = std::clamp(t, 0.0, 1.0);
  h.closest = s.a + ab * t;
  h.dist2 = (p - h.closest).squared_norm();
  h.surf_normal = s.line_normal;
  return h;
}

PrimHit closest_on_arc(const WallPrimitive& s, const Vec2& p) {
  PrimHit h;
  const Vec2 rel = p - s.center;
  double ang = std::atan2(rel.y, rel.x);
  // Reduce into [ang0, ang0 + 2*pi).
  while (ang < s.ang0) ang += 2.0 * kPi;
  while (ang >= s.ang0 + 2.0 * kPi) ang -= 2.0 * kPi;
  if (ang <= s.ang1) {
    const Vec2 dir{std::cos(ang), std::sin(ang)};
    h.closest = s.center + dir * s.radius;
    h.interior = true;
    h.surf_normal = dir * s.normal_sign;
    h.kappa0 = s.normal_sign / s.radius;
  } else {
    const Vec2 e0 = s.point_at(0.0), e1 = s.point_at(1.0);
    const double d0 = (p - e0).squared_norm(), d1 = (p - e1).squared_norm();
    h.closest = d0 <= d1 ? e0 : e1;
    h.interior = false;
    const Vec2 dir = ((d0 <= d1 ? e0 : e1) - s.center).normalized();
    h.surf_normal = dir * s.normal_sign;
  }
  h.dist2 = (p - h.closest).squared_norm();
  return h;
}

}  // namespace

SignedDistanceResult DieBoundary::signed_distance(const Vec2& p) const {
  PrimHit best;
  WallId best_id = WallId::InletLeft;
  for (const DieWall& w : walls_) {
    for (const WallPrimitive& s : w.segments) {
      PrimHit h = s.kind == WallPrimitive::Kind::Line ? closest_on_line(s, p)
                                                      : closest_on_arc(s, p);
      if (h.dist2 < best.dist2) {
        best = h;
        best_id = w.id;
      }
    }
  }
  SignedDistanceResult r;
  const double d = std::sqrt(best.dist2);
  const double sign = inside_material(p) ? -1.0 : 1.0;
  r.distance = sign * d;
  r.nearest_wall = best_id;
  r.closest_point = best.closest;
  if (d > 1e-14 * std::max(1.0, w1_)) {
    r.normal = (p - best.closest) * (sign / d);
  } else {
    r.normal = best.surf_normal;
  }
  if (best.interior) {
    const double denom = 1.0 + best.kappa0 * r.distance;
    r.hess_coeff = denom != 0.0 ? best.kappa0 / denom : 0.0;
  } else {
    r.hess_coeff = r.distance != 0.0 ? 1.0 / r.distance : 0.0;
  }
  return r;
}

std::vector<std::pair<WallId, std::vector<Vec2>>> boundary_polyline(
    const std::vector<DieWall>& walls, int arc_samples) {
  std::vector<std::pair<WallId, std::vector<Vec2>>> out;
  for (const DieWall& w : walls) {
    std::vector<Vec2> pts;
    for (const WallPrimitive& s : w.segments) {
      const int n = s.kind == WallPrimitive::Kind::Arc ? arc_samples : 1;
      for (int k = 0; k <= n; ++k) pts.push_back(s.point_at(double(k) / n));
    }
    out.emplace_back(w.id, std::move(pts));
  }
  return out;
}

}  // namespace ecae
