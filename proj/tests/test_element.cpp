#include <cmath>

#include "doctest.h"
#include "ecae/element.hpp"

using namespace ecae;

namespace {

MaterialParams paper_material() {
  MaterialParams p;
  p.E = 200e9;
  p.nu = 0.3;
  p.sigma_y0 = 400e6;
  p.H = 5e6;
  return p;
}

const std::array<Vec2, 4> kUnitSquare = {Vec2{0, 0}, Vec2{1, 0}, Vec2{1, 1}, Vec2{0, 1}};

std::array<Vec2, 4> rotated(const std::array<Vec2, 4>& x, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  std::array<Vec2, 4> r;
  for (int a = 0; a < 4; ++a) r[a] = {c * x[a].x - s * x[a].y, s * x[a].x + c * x[a].y};
  return r;
}

}  // namespace

TEST_CASE("rigid translation changes neither forces nor state") {
  const MaterialParams mat = paper_material();
  ElementFormulation form;
  ElementState st;
  st.gp[0].sigma = {3e8, -1e8, 5e7, 8e7};
  for (int g = 1; g < 4; ++g) st.gp[g] = st.gp[0];
  st.gp[0].eqps = 0.04;

  std::array<Vec2, 4> moved = kUnitSquare;
  for (auto& p : moved) p += Vec2{0.37, -1.2};
  const auto r0 = element_internal_force(kUnitSquare, kUnitSquare, st, mat, form);
  const auto r1 = element_internal_force(kUnitSquare, moved, st, mat, form);
  for (int i = 0; i < 8; ++i) CHECK(r1.f[i] == doctest::Approx(r0.f[i]).epsilon(1e-13));
  for (int g = 0; g < 4; ++g)
    for (int c = 0; c < 4; ++c)
      CHECK(r1.state.gp[g].sigma[c] ==
            doctest::Approx(st.gp[g].sigma[c]).epsilon(1e-13).scale(4e8));
}

TEST_CASE("finite rotation corotates the stored stress exactly") {
  const MaterialParams mat = paper_material();
  ElementFormulation form;
  ElementState st;
  const std::array<double, 4> sigma0 = {2.5e8, -1.5e8, 4e7, 1.1e8};
  for (int g = 0; g < 4; ++g) st.gp[g].sigma = sigma0;

  const double total = 30.0 * 3.14159265358979323846 / 180.0;
  const int n = 100;
  std::array<Vec2, 4> prev = kUnitSquare;
  const double vm0 = von_mises(sigma0);
  for (int k = 1; k <= n; ++k) {
    const auto cur = rotated(kUnitSquare, total * k / n);
    const auto r = element_internal_force(prev, cur, st, mat, form);
    st = r.state;
    prev = cur;
  }
  // Exact tensor rotation of the initial stress by 30 degrees.
  const double c = std::cos(total), s = std::sin(total);
  const double xx = sigma0[0], yy = sigma0[1], xy = sigma0[3];
  const double exx = c * c * xx + s * s * yy - 2 * c * s * xy;
  const double eyy = s * s * xx + c * c * yy + 2 * c * s * xy;
  const double exy = c * s * (xx - yy) + (c * c - s * s) * xy;
  for (int g = 0; g < 4; ++g) {
    CHECK(st.gp[g].sigma[0] == doctest::Approx(exx).epsilon(1e-8).scale(4e8));
    CHECK(st.gp[g].sigma[1] == doctest::Approx(eyy).epsilon(1e-8).scale(4e8));
    CHECK(st.gp[g].sigma[2] == doctest::Approx(sigma0[2]).epsilon(1e-8).scale(4e8));
    CHECK(st.gp[g].sigma[3] == doctest::Approx(exy).epsilon(1e-8).scale(4e8));
    CHECK(von_mises(st.gp[g].sigma) == doctest::Approx(vm0).epsilon(1e-8));
    CHECK(st.gp[g].eqps == 0.0);
  }
}

TEST_CASE("uniform elastic stretch matches the closed-form nodal forces") {
  const MaterialParams mat = paper_material();
  ElementFormulation form;
  ElementState st;
  const double a = 2e-4, b = -1e-4;
  std::array<Vec2, 4> cur = kUnitSquare;
  for (auto& p : cur) {
    p.x *= 1.0 + a;
    p.y *= 1.0 + b;
  }
  const auto r = element_internal_force(kUnitSquare, cur, st, mat, form);

  // Midpoint kinematics: exx = a/(1+a/2), eyy = b/(1+b/2).
  const double exx = a / (1.0 + 0.5 * a), eyy = b / (1.0 + 0.5 * b);
  const double lam = mat.lambda(), mu = mat.mu();
  const double sxx = (lam + 2 * mu) * exx + lam * eyy;
  const double syy = lam * exx + (lam + 2 * mu) * eyy;
  const double szz = lam * (exx + eyy);
  const double W = 1.0 + a, H = 1.0 + b;

  CHECK(r.state.gp[0].sigma[0] == doctest::Approx(sxx).epsilon(1e-12));
  CHECK(r.state.gp[0].sigma[1] == doctest::Approx(syy).epsilon(1e-12));
  CHECK(r.state.gp[0].sigma[2] == doctest::Approx(szz).epsilon(1e-12));
  // Equivalent nodal forces of a constant stress over the current rectangle.
  CHECK(r.f[2] == doctest::Approx(0.5 * sxx * H).epsilon(1e-12));   // node 2 x
  CHECK(r.f[3] == doctest::Approx(-0.5 * syy * W).epsilon(1e-12));  // node 2 y
  CHECK(r.f[0] == doctest::Approx(-0.5 * sxx * H).epsilon(1e-12));
  CHECK(r.f[5] == doctest::Approx(0.5 * syy * W).epsilon(1e-12));
}

TEST_CASE("single element with B-bar passes a distorted patch of linear displacement") {
  const MaterialParams mat = paper_material();
  ElementFormulation form;
  const std::array<Vec2, 4> ref = {Vec2{0, 0}, Vec2{1.3, 0.1}, Vec2{1.1, 0.9}, Vec2{-0.2, 1.2}};
  const double g[4] = {3e-4, -2e-4, 1.5e-4, 4e-5};  // du = [[g0,g1],[g2,g3]] x
  std::array<Vec2, 4> cur;
  for (int i = 0; i < 4; ++i)
    cur[i] = {ref[i].x + g[0] * ref[i].x + g[1] * ref[i].y,
              ref[i].y + g[2] * ref[i].x + g[3] * ref[i].y};
  ElementState st;
  const auto r = element_internal_force(ref, cur, st, mat, form);
  for (int gp = 1; gp < 4; ++gp)
    for (int c = 0; c < 4; ++c)
      CHECK(r.state.gp[gp].sigma[c] ==
            doctest::Approx(r.state.gp[0].sigma[c]).epsilon(1e-10).scale(mat.E * 1e-4));
}

TEST_CASE("single-point element without hourglass control has a zero-energy mode") {
  const MaterialParams mat = paper_material();
  ElementFormulation form;
  form.integration = Integration::SinglePointHourglass;
  form.hourglass_coefficient = 0.0;  // control disabled for the spurious-mode check
  ElementState st;
  // Hourglass pattern: +h, -h, +h, -h in y.
  std::array<Vec2, 4> cur = kUnitSquare;
  const double amp = 1e-4;
  const double hg[4] = {1.0, -1.0, 1.0, -1.0};
  for (int i = 0; i < 4; ++i) cur[i].y += amp * hg[i];
  const auto r = element_internal_force(kUnitSquare, cur, st, mat, form);
  double fmax = 0.0;
  for (double v : r.f) fmax = std::max(fmax, std::abs(v));
  CHECK(fmax < 1e-6 * mat.E * amp);  // no resistance: spurious mode

  form.hourglass_coefficient = 0.03;
  const auto rc = element_internal_force(kUnitSquare, cur, st, mat, form);
  double fmax_c = 0.0;
  for (double v : rc.f) fmax_c = std::max(fmax_c, std::abs(v));
  CHECK(fmax_c > 1e-3 * mat.E * amp * 0.01);  // stabilized
}

TEST_CASE("inverted configuration raises the element error") {
  const MaterialParams mat = paper_material();
  ElementFormulation form;
  ElementState st;
  std::array<Vec2, 4> cur = kUnitSquare;
  std::swap(cur[1], cur[3]);  // flips orientation
  CHECK_THROWS_AS(element_internal_force(kUnitSquare, cur, st, mat, form),
                  InvertedElementError);
}

TEST_CASE("element tangent equals finite differences of the element force") {
  const MaterialParams mat = paper_material();
  for (Integration integ :
       {Integration::SelectiveReducedBbar, Integration::SinglePointHourglass}) {
    ElementFormulation form;
    form.integration = integ;
    ElementState st;
    st.gp[0].sigma = {1e8, -2e8, 3e7, 9e7};
    for (int g = 1; g < 4; ++g) st.gp[g] = st.gp[0];
    const std::array<Vec2, 4> ref = {Vec2{0, 0}, Vec2{1.1, 0.05}, Vec2{1.0, 1.1},
                                     Vec2{-0.1, 0.95}};
    std::array<Vec2, 4> cur = ref;
    // A deformation large enough to reach the plastic branch.
    for (int i = 0; i < 4; ++i) {
      cur[i].x += 4e-3 * ref[i].y + 2.5e-3 * ref[i].x;
      cur[i].y += -1.5e-3 * ref[i].x;
    }
    const auto r = element_internal_force(ref, cur, st, mat, form);
    const double h = 1e-9;
    for (int d = 0; d < 8; ++d) {
      auto cp = cur, cm = cur;
      (d % 2 ? cp[d / 2].y : cp[d / 2].x) += h;
      (d % 2 ? cm[d / 2].y : cm[d / 2].x) -= h;
      const auto rp = element_internal_force(ref, cp, st, mat, form);
      const auto rm = element_internal_force(ref, cm, st, mat, form);
      for (int i = 0; i < 8; ++i) {
        const double fd = (rp.f[i] - rm.f[i]) / (2 * h);
        CHECK(r.k[i][d] == doctest::Approx(fd).epsilon(1e-5).scale(mat.E));
      }
    }
  }
}
