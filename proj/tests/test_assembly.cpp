#include <cmath>

#include "doctest.h"
#include "ecae/assembly.hpp"
#include "ecae/solver.hpp"

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

// Four irregular quads sharing one interior node (the classic patch).
Mesh patch_mesh() {
  Mesh m;
  m.nodes = {{0.0, 0.0},   {0.55, 0.0}, {1.0, 0.0},  {0.0, 0.45}, {0.42, 0.58},
             {1.0, 0.52}, {0.0, 1.0},  {0.62, 1.0}, {1.0, 1.0}};
  m.elems = {{0, 1, 4, 3}, {1, 2, 5, 4}, {3, 4, 7, 6}, {4, 5, 8, 7}};
  m.nx = 2;
  m.ny = 2;
  m.hx = m.hy = 0.5;
  return m;
}

SolveConfig tight_solve() {
  SolveConfig s;
  s.newton_tol_force = 1e-13;
  s.newton_tol_disp = 1e-12;
  s.max_newton_iters = 30;
  s.regularization_rel = 0.0;
  return s;
}

}  // namespace

TEST_CASE("zero displacement gives a zero residual") {
  BilletSpec spec;
  spec.width = 0.025;
  spec.length = 0.025;
  spec.target_element_size = 0.025 / 5;
  spec.clearance = 0.0;
  const Mesh mesh = generate_mesh(spec);
  std::vector<ElementState> states(mesh.n_elems());
  const auto sys = assemble(mesh, mesh.nodes, mesh.nodes, states, paper_material(), {});
  CHECK(sys.f_int.norm() == 0.0);
}

TEST_CASE("patch test: linear boundary displacement yields constant stress") {
  const Mesh mesh = patch_mesh();
  const MaterialParams mat = paper_material();
  const double g[4] = {8e-4, 3e-4, -2e-4, -5e-4};

  IncrementInputs in;
  in.mesh = &mesh;
  in.material = mat;
  in.formulation = {};
  in.solve = tight_solve();
  for (int n = 0; n < mesh.n_nodes(); ++n) {
    if (n == 4) continue;  // interior node stays free
    const Vec2 p = mesh.nodes[n];
    in.prescribed.push_back({2 * n, p.x + g[0] * p.x + g[1] * p.y});
    in.prescribed.push_back({2 * n + 1, p.y + g[2] * p.x + g[3] * p.y});
  }
  std::vector<ElementState> states(mesh.n_elems());
  const auto out = solve_increment(in, mesh.nodes, states);
  REQUIRE(out.converged);

  // Interior node lands on the linear field.
  const Vec2 p4 = mesh.nodes[4];
  CHECK(out.coords[4].x ==
        doctest::Approx(p4.x + g[0] * p4.x + g[1] * p4.y).epsilon(1e-10));
  CHECK(out.coords[4].y ==
        doctest::Approx(p4.y + g[2] * p4.x + g[3] * p4.y).epsilon(1e-10));

  // Constant stress across every integration point of every element.
  const auto ref = out.states[0].gp[0].sigma;
  double scale = 0.0;
  for (double c : ref) scale = std::max(scale, std::abs(c));
  for (const auto& es : out.states)
    for (int gp = 0; gp < 4; ++gp)
      for (int c = 0; c < 4; ++c)
        CHECK(es.gp[gp].sigma[c] == doctest::Approx(ref[c]).epsilon(1e-10).scale(scale));
}

TEST_CASE("two-element strip under end load matches the confined-bar solution") {
  Mesh m;
  const double L = 2.0, H = 1.0;
  m.nodes = {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {2, 1}};
  m.elems = {{0, 1, 4, 3}, {1, 2, 5, 4}};
  m.nx = 2;
  m.ny = 1;
  m.hx = m.hy = 1.0;
  const MaterialParams mat = paper_material();

  const double F = 1e4;  // small enough to stay effectively linear
  IncrementInputs in;
  in.mesh = &m;
  in.material = mat;
  in.solve = tight_solve();
  for (int n : {0, 3}) in.prescribed.push_back({2 * n, 0.0});
  for (int n = 0; n < 6; ++n) in.prescribed.push_back({2 * n + 1, m.nodes[n].y});
  in.f_ext = Eigen::VectorXd::Zero(12);
  in.f_ext[2 * 2] = 0.5 * F;
  in.f_ext[2 * 5] = 0.5 * F;

  std::vector<ElementState> states(m.n_elems());
  const auto out = solve_increment(in, m.nodes, states);
  REQUIRE(out.converged);
  const double mstar = mat.lambda() + 2.0 * mat.mu();  // confined plane-strain modulus
  const double tip = F * L / (mstar * H);
  CHECK(out.coords[2].x - 2.0 == doctest::Approx(tip).epsilon(1e-6));
  CHECK(out.coords[5].x - 2.0 == doctest::Approx(tip).epsilon(1e-6));
}

TEST_CASE("global tangent matches finite differences on a small system") {
  Mesh m = patch_mesh();
  const MaterialParams mat = paper_material();
  // Distorted state large enough to activate plasticity in some elements.
  std::vector<Vec2> cur = m.nodes;
  uint64_t s = 0x8f1d3a2b5c7e9011ull;
  auto rnd = [&]() {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    return double(s >> 11) / double(1ull << 53) - 0.5;
  };
  for (auto& p : cur) {
    p.x += 6e-3 * rnd() + 2e-3 * p.y;
    p.y += 6e-3 * rnd();
  }
  std::vector<ElementState> states(m.n_elems());
  const auto sys = assemble(m, m.nodes, cur, states, mat, {});

  bool any_plastic = false;
  for (const auto& es : sys.states_trial)
    for (int g = 0; g < 4; ++g) any_plastic = any_plastic || es.gp[g].eqps > 0.0;
  CHECK(any_plastic);

  const double h = 1e-8;
  const int ndof = 2 * m.n_nodes();
  REQUIRE(ndof <= 30);
  Eigen::MatrixXd K = Eigen::MatrixXd(sys.tangent);
  for (int d = 0; d < ndof; ++d) {
    auto cp = cur, cm = cur;
    (d % 2 ? cp[d / 2].y : cp[d / 2].x) += h;
    (d % 2 ? cm[d / 2].y : cm[d / 2].x) -= h;
    const auto rp = assemble_residual(m, m.nodes, cp, states, mat, {});
    const auto rm = assemble_residual(m, m.nodes, cm, states, mat, {});
    for (int i = 0; i < ndof; ++i) {
      const double fd = (rp.f_int[i] - rm.f_int[i]) / (2 * h);
      CHECK(K(i, d) == doctest::Approx(fd).epsilon(1e-4).scale(mat.E));
    }
  }
}

TEST_CASE("assembly is bitwise deterministic across worker counts") {
  BilletSpec spec;
  spec.width = 0.025;
  spec.length = 0.1;
  spec.target_element_size = 2.5e-3;
  spec.clearance = 0.0;
  const Mesh mesh = generate_mesh(spec);
  const MaterialParams mat = paper_material();

  std::vector<Vec2> cur = mesh.nodes;
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    const Vec2 p = mesh.nodes[i];
    cur[i].x += 1e-3 * std::sin(300.0 * p.y) + 2e-3 * p.y;
    cur[i].y += 1e-3 * std::cos(200.0 * p.x);
  }
  std::vector<ElementState> states(mesh.n_elems());

  const auto ref = assemble_serial(mesh, mesh.nodes, cur, states, mat, {});
  for (int threads : {1, 2, 3}) {
    const auto par = assemble(mesh, mesh.nodes, cur, states, mat, {}, threads);
    CHECK((par.f_int - ref.f_int).lpNorm<Eigen::Infinity>() == 0.0);
    Eigen::SparseMatrix<double> diff = par.tangent - ref.tangent;
    CHECK(diff.norm() == 0.0);
    for (int e = 0; e < mesh.n_elems(); ++e)
      for (int g = 0; g < 4; ++g)
        CHECK(par.states_trial[e].gp[g].eqps == ref.states_trial[e].gp[g].eqps);
  }
}

TEST_CASE("inverted elements are reported with their id") {
  BilletSpec spec;
  spec.width = 0.025;
  spec.length = 0.025;
  spec.target_element_size = 0.025 / 5;
  spec.clearance = 0.0;
  const Mesh mesh = generate_mesh(spec);
  std::vector<Vec2> cur = mesh.nodes;
  // Collapse one node far across its element.
  cur[mesh.node_id(2, 2)] += Vec2{0.02, 0.02};
  std::vector<ElementState> states(mesh.n_elems());
  CHECK_THROWS_AS(assemble(mesh, mesh.nodes, cur, states, paper_material(), {}),
                  AssemblyError);
}
