#include <map>
#include <set>

#include "doctest.h"
#include "ecae/mesh.hpp"

using namespace ecae;

TEST_CASE("generate_mesh produces the documented element counts") {
  BilletSpec s;
  s.width = 0.025;
  s.length = 0.55;
  s.target_element_size = 0.5e-3;
  s.clearance = 1e-6;
  const Mesh m = generate_mesh(s);
  CHECK(m.nx == 50);
  CHECK(m.ny == 1100);
  CHECK(m.n_elems() == 55000);
  CHECK(m.n_nodes() == 51 * 1101);

  // The mid refinement level of the study: size within 5% of target.
  s.target_element_size = 0.758e-3;
  const Mesh m2 = generate_mesh(s);
  CHECK(std::abs(m2.hx - s.target_element_size) < 0.05 * s.target_element_size);
  CHECK(std::abs(m2.hy - s.target_element_size) < 0.05 * s.target_element_size);
  CHECK(m2.hx / m2.hy == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("single-row mesh and width guard") {
  BilletSpec s;
  s.width = 0.025;
  s.length = 0.025;
  s.target_element_size = 0.025 / 4;  // minimum allowed across the width
  s.clearance = 0.0;
  const Mesh m = generate_mesh(s);
  CHECK(m.nx == 4);
  CHECK(m.ny == 4);

  s.target_element_size = 0.025;  // would give a single element across
  CHECK_THROWS_WITH_AS(generate_mesh(s), doctest::Contains("fewer than 4"), MeshError);
}

TEST_CASE("mesh is conforming and covers the billet area exactly") {
  BilletSpec s;
  s.width = 0.025;
  s.length = 0.1;
  s.target_element_size = 2.5e-3;
  s.clearance = 0.0;
  const Mesh m = generate_mesh(s);

  std::map<std::pair<int, int>, int> edge_count;
  double area = 0.0;
  for (const auto& e : m.elems) {
    for (int k = 0; k < 4; ++k) {
      int a = e[k], b = e[(k + 1) % 4];
      if (a > b) std::swap(a, b);
      ++edge_count[{a, b}];
    }
    // Shoelace, counter-clockwise connectivity.
    double twice = 0.0;
    for (int k = 0; k < 4; ++k) {
      const Vec2 p = m.nodes[e[k]], q = m.nodes[e[(k + 1) % 4]];
      twice += p.cross(q);
    }
    CHECK(twice > 0.0);
    area += 0.5 * twice;
  }
  CHECK(area == doctest::Approx(s.width * s.length).epsilon(1e-12));
  int boundary_edges = 0;
  for (const auto& [edge, count] : edge_count) {
    CHECK((count == 1 || count == 2));
    boundary_edges += count == 1;
  }
  CHECK(boundary_edges == 2 * (m.nx + m.ny));
}

TEST_CASE("face sets are exclusive with Left > Right > Top > Bottom precedence") {
  BilletSpec s;
  s.width = 0.025;
  s.length = 0.05;
  s.target_element_size = 5e-3;
  s.clearance = 0.0;
  const Mesh m = generate_mesh(s);

  std::set<int> seen;
  for (Face f : {Face::Left, Face::Right, Face::Top, Face::Bottom})
    for (int id : m.face_set(f)) {
      CHECK(seen.count(id) == 0);
      seen.insert(id);
    }
  CHECK(int(seen.size()) == int(m.boundary_nodes().size()));
  // Corners live in the Left/Right sets.
  CHECK(std::count(m.set_left.begin(), m.set_left.end(), m.node_id(0, 0)) == 1);
  CHECK(std::count(m.set_right.begin(), m.set_right.end(), m.node_id(m.nx, 0)) == 1);
  CHECK(std::count(m.set_top.begin(), m.set_top.end(), m.node_id(0, m.ny)) == 0);
}

TEST_CASE("material_line picks the nodes along a reference segment") {
  BilletSpec s;
  s.width = 0.025;
  s.length = 0.1;
  s.target_element_size = 2.5e-3;
  s.clearance = 0.0;
  const Mesh m = generate_mesh(s);

  CHECK_THROWS_WITH_AS(material_line(m, {0.01, 0.02}, {0.01, 0.02}),
                       doctest::Contains("coincide"), MeshError);

  // A line across the billet width picks exactly one full node row.
  const auto row = material_line(m, {0.0, 0.05}, {0.025, 0.05});
  CHECK(int(row.size()) == m.nx + 1);
  for (size_t i = 0; i + 1 < row.size(); ++i)
    CHECK(m.nodes[row[i]].x < m.nodes[row[i + 1]].x);

  // Determinism: regeneration reproduces identical ids.
  const Mesh m2 = generate_mesh(s);
  const auto row2 = material_line(m2, {0.0, 0.05}, {0.025, 0.05});
  CHECK(row == row2);
}
