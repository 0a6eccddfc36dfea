#include <cmath>

#include "doctest.h"
#include "ecae/geometry.hpp"

using namespace ecae;

namespace {

// Deterministic LCG so tests never depend on global RNG state.
struct Lcg {
  uint64_t s = 0x9e3779b97f4a7c15ull;
  double next() {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    return double(s >> 11) / double(1ull << 53);
  }
};

DieProfile paper_profile(double er = 0.75) {
  DieProfile p;
  p.ER = er;
  return p;
}

Vec2 lerp(const Vec2& a, const Vec2& b, double t) { return a + (b - a) * t; }

}  // namespace

TEST_CASE("build_die reproduces the tabulated dimensions") {
  const DieProfile p = paper_profile(0.75);
  const auto walls = build_die(p);
  REQUIRE(walls.size() == 6);
  CHECK(p.W2() == doctest::Approx(0.01875).epsilon(1e-12));
  CHECK(p.R1() == doctest::Approx(0.020).epsilon(1e-12));
  CHECK(p.R2() == doctest::Approx(0.045).epsilon(1e-12));
  CHECK(p.L1() == doctest::Approx(0.55).epsilon(1e-12));
  CHECK(p.L2() == doctest::Approx(0.15).epsilon(1e-12));

  const DieProfile half = paper_profile(0.5);
  CHECK(half.W2() == doctest::Approx(0.0125).epsilon(1e-12));
  CHECK_NOTHROW(build_die(half));
}

TEST_CASE("degenerate sharp-corner die builds") {
  DieProfile p;
  p.W1 = 1.0;
  p.ER = 1.0;
  p.R1n = 0.0;
  p.R2n = 0.0;
  const auto walls = build_die(p);
  REQUIRE(walls.size() == 6);
  CHECK(p.W2() == doctest::Approx(1.0));
  // Fillet walls are present but empty.
  int empty = 0;
  for (const auto& w : walls) empty += w.segments.empty();
  CHECK(empty == 2);
}

TEST_CASE("die validation rejects bad profiles") {
  DieProfile p;
  p.ER = 1.5;
  CHECK_THROWS_WITH_AS(build_die(p), doctest::Contains("ER must be in (0, 1]"),
                       GeometryError);
  p = DieProfile{};
  p.W1 = -1.0;
  CHECK_THROWS_AS(build_die(p), GeometryError);
  p = DieProfile{};
  p.R2n = 30.0;  // fillet longer than the channels
  CHECK_THROWS_AS(build_die(p), GeometryError);
  p = DieProfile{};
  p.phi_deg = 120.0;
  CHECK_THROWS_AS(build_die(p), GeometryError);
}

TEST_CASE("overlapping fillets are rejected") {
  DieProfile p;
  p.ER = 0.05;  // near-closed exit with a sharp inner corner inside the fill
  p.R1n = 0.0;
  p.R2n = 1.8;
  CHECK_THROWS_WITH_AS(build_die(p), doctest::Contains("pinched"), GeometryError);
}

TEST_CASE("signed distance: boundary, flat wall, and channel spacing") {
  const DieProfile p = paper_profile(0.75);
  const DieBoundary die(p);

  // Point exactly on the exit bottom wall.
  const auto on_wall = die.signed_distance({0.1, 0.0});
  CHECK(on_wall.distance == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(on_wall.nearest_wall == WallId::ExitBottom);

  // Height above the exit bottom wall, far from fillets.
  const auto above = die.signed_distance({0.12, 0.004});
  CHECK(above.distance == doctest::Approx(0.004).epsilon(1e-12));
  CHECK(above.nearest_wall == WallId::ExitBottom);
  CHECK(above.normal.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(above.normal.y == doctest::Approx(1.0).epsilon(1e-12));

  // Inlet spacing W1 along the straight portion above both fillets.
  for (int k = 0; k < 20; ++k) {
    const double y = (p.W2() + p.R1()) * 1.05 +
                     (p.L1() - (p.W2() + p.R1()) * 1.05) * k / 19.0;
    const auto left = die.signed_distance({1e-9, y});
    const auto right = die.signed_distance({p.W1 - 1e-9, y});
    CHECK(left.distance + right.distance == doctest::Approx(p.W1 - 2e-9).epsilon(1e-9));
  }
  // Exit spacing ER*W1 along the straight exit portion.
  const double x0 = std::max(p.R2(), p.W1 + p.R1()) * 1.01;
  for (int k = 0; k < 20; ++k) {
    const double x = x0 + (p.L2() - x0) * k / 19.0;
    const auto bot = die.signed_distance({x, 1e-9});
    const auto top = die.signed_distance({x, p.W2() - 1e-9});
    CHECK(bot.distance + top.distance == doctest::Approx(p.W2() - 2e-9).epsilon(1e-9));
  }
}

TEST_CASE("signed distance matches a dense polyline oracle") {
  const DieProfile p = paper_profile(0.75);
  const DieBoundary die(p);
  const auto polys = boundary_polyline(die.walls(), 20000);

  auto oracle = [&](const Vec2& q) {
    double best = 1e300;
    for (const auto& [id, pts] : polys)
      for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const Vec2 a = pts[i], b = pts[i + 1];
        const Vec2 ab = b - a;
        const double t = std::clamp((q - a).dot(ab) / ab.squared_norm(), 0.0, 1.0);
        best = std::min(best, (q - lerp(a, b, t)).norm());
      }
    return best;
  };

  Lcg rng;
  for (int k = 0; k < 200; ++k) {
    // Points scattered around the R2 fillet, both sides of the wall.
    const double ang = 3.14159265 * (1.0 + 0.5 * rng.next());
    const double rr = p.R2() * (0.7 + 0.6 * rng.next());
    const Vec2 q = die.outer_center() + Vec2{rr * std::cos(ang), rr * std::sin(ang)};
    const auto sd = die.signed_distance(q);
    CHECK(std::abs(sd.distance) == doctest::Approx(oracle(q)).epsilon(1e-6));
  }
}

TEST_CASE("signed distance gradient has unit magnitude off the medial axis") {
  const DieProfile p = paper_profile(0.75);
  const DieBoundary die(p);
  Lcg rng;
  const double h = 1e-8;
  int tested = 0;
  auto grad_check = [&](const Vec2& q) {
    const double dx = (die.signed_distance({q.x + h, q.y}).distance -
                       die.signed_distance({q.x - h, q.y}).distance) /
                      (2 * h);
    const double dy = (die.signed_distance({q.x, q.y + h}).distance -
                       die.signed_distance({q.x, q.y - h}).distance) /
                      (2 * h);
    CHECK(std::sqrt(dx * dx + dy * dy) == doctest::Approx(1.0).epsilon(1e-5));
    const auto sd = die.signed_distance(q);
    CHECK(sd.normal.x == doctest::Approx(dx).epsilon(1e-4));
    CHECK(sd.normal.y == doctest::Approx(dy).epsilon(1e-4));
    ++tested;
  };
  for (int k = 0; k < 40; ++k) {
    // Near the inlet left wall.
    grad_check(
        {0.2 * p.W1 * rng.next(), p.R2() + (p.L1() - p.R2()) * (0.05 + 0.9 * rng.next())});
    // Near the exit bottom wall, inside the channel.
    grad_check(
        {p.R2() + (p.L2() - p.R2()) * (0.05 + 0.9 * rng.next()), 0.3 * p.W2() * rng.next()});
    // Near the outer fillet arc (void side).
    const double ang = 3.14159265 * (1.02 + 0.46 * rng.next());
    const double rr = p.R2() * (0.75 + 0.2 * rng.next());
    grad_check(die.outer_center() + Vec2{rr * std::cos(ang), rr * std::sin(ang)});
  }
  CHECK(tested == 120);
}

TEST_CASE("build_die scales linearly with W1") {
  DieProfile a = paper_profile(0.75);
  DieProfile b = a;
  const double k = 3.772;
  b.W1 = a.W1 * k;
  const auto wa = build_die(a);
  const auto wb = build_die(b);
  REQUIRE(wa.size() == wb.size());
  for (size_t i = 0; i < wa.size(); ++i) {
    REQUIRE(wa[i].segments.size() == wb[i].segments.size());
    for (size_t s = 0; s < wa[i].segments.size(); ++s)
      for (double t : {0.0, 0.25, 0.5, 1.0}) {
        const Vec2 pa = wa[i].segments[s].point_at(t);
        const Vec2 pb = wb[i].segments[s].point_at(t);
        CHECK(pb.x == doctest::Approx(pa.x * k).epsilon(1e-12));
        CHECK(pb.y == doctest::Approx(pa.y * k).epsilon(1e-12));
      }
  }
}

TEST_CASE("fillet swap exchanges the corner radii") {
  DieProfile p = paper_profile(0.75);
  p.swap_fillets = true;
  CHECK(p.inner_radius() == doctest::Approx(0.045));
  CHECK(p.outer_radius() == doctest::Approx(0.020));
  const DieBoundary die(p);
  // The outer arc now carries the R1 radius.
  const auto sd = die.signed_distance({1e-4, 1e-4});
  CHECK(sd.nearest_wall == WallId::R1Fillet);
}

TEST_CASE("inside/outside sign convention") {
  const DieProfile p = paper_profile(0.75);
  const DieBoundary die(p);
  CHECK(die.signed_distance({0.5 * p.W1, 0.3}).distance > 0.0);             // channel void
  CHECK(die.signed_distance({-1e-3, 0.3}).distance < 0.0);                  // left block
  CHECK(die.signed_distance({0.1, -1e-3}).distance < 0.0);                  // bottom block
  CHECK(die.signed_distance({0.5e-3, 0.5e-3}).distance < 0.0);              // fillet fill
  CHECK(die.signed_distance({p.W1 + 1e-3, p.W2() + 1e-3}).distance > 0.0);  // trimmed tip
  CHECK(die.signed_distance({p.L2() + 0.05, p.W2() + 0.01}).distance > 0.0);  // past die end
}
