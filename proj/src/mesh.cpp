#include "ecae/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace ecae {

void BilletSpec::validate() const {
  if (!(width > 0.0 && length > 0.0))
    throw MeshError("billet: width and length must be positive");
  if (!(target_element_size > 0.0))
    throw MeshError("billet: target_element_size must be positive");
  if (clearance < 0.0) throw MeshError("billet: clearance must be non-negative");
  if (clearance > 0.5 * target_element_size)
    throw MeshError("billet: clearance must be much smaller than the element size");
}

std::vector<int> Mesh::column(int i) const {
  std::vector<int> ids(ny + 1);
  for (int j = 0; j <= ny; ++j) ids[j] = node_id(i, j);
  return ids;
}

std::vector<int> Mesh::row(int j) const {
  std::vector<int> ids(nx + 1);
  for (int i = 0; i <= nx; ++i) ids[i] = node_id(i, j);
  return ids;
}

const std::vector<int>& Mesh::face_set(Face f) const {
  switch (f) {
    case Face::Left: return set_left;
    case Face::Right: return set_right;
    case Face::Top: return set_top;
    default: return set_bottom;
  }
}

std::vector<int> Mesh::boundary_nodes() const {
  std::vector<int> ids;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      if (i == 0 || i == nx || j == 0 || j == ny) ids.push_back(node_id(i, j));
  return ids;
}

Mesh generate_mesh(const BilletSpec& spec) {
  spec.validate();
  Mesh m;
  m.nx = int(std::lround(spec.width / spec.target_element_size));
  m.ny = int(std::lround(spec.length / spec.target_element_size));
  if (m.nx < 4)
    throw MeshError("billet: fewer than 4 elements across the width; refine target_element_size");
  if (m.ny < 1) m.ny = 1;
  m.hx = spec.width / m.nx;
  m.hy = spec.length / m.ny;
  const double aspect = m.hx / m.hy;
  if (aspect < 0.9 || aspect > 1.1)
    throw MeshError("billet: element aspect ratio " + std::to_string(aspect) +
                    " outside [0.9, 1.1]");
  if (std::abs(m.hx - spec.target_element_size) > 0.05 * spec.target_element_size ||
      std::abs(m.hy - spec.target_element_size) > 0.05 * spec.target_element_size)
    throw MeshError("billet: achievable element size deviates more than 5% from target");

  m.nodes.reserve(size_t(m.nx + 1) * (m.ny + 1));
  for (int j = 0; j <= m.ny; ++j)
    for (int i = 0; i <= m.nx; ++i) m.nodes.push_back({i * m.hx, j * m.hy});

  m.elems.reserve(size_t(m.nx) * m.ny);
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i)
      m.elems.push_back({m.node_id(i, j), m.node_id(i + 1, j), m.node_id(i + 1, j + 1),
                         m.node_id(i, j + 1)});

  for (int j = 0; j <= m.ny; ++j) {
    m.set_left.push_back(m.node_id(0, j));
    m.set_right.push_back(m.node_id(m.nx, j));
  }
  for (int i = 1; i < m.nx; ++i) {
    m.set_top.push_back(m.node_id(i, m.ny));
    m.set_bottom.push_back(m.node_id(i, 0));
  }
  return m;
}

std::vector<int> material_line(const Mesh& mesh, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len = ab.norm();
  const double tol = 0.5 * std::min(mesh.hx, mesh.hy) * (1.0 + 1e-12);
  if (len < 1e-15) throw MeshError("material_line: endpoints coincide");

  struct Pick {
    int id;
    double t;
  };
  std::vector<Pick> picks;
  for (int id = 0; id < mesh.n_nodes(); ++id) {
    const Vec2 p = mesh.nodes[id];
    double t = (p - a).dot(ab) / (len * len);
    const double tc = std::clamp(t, 0.0, 1.0);
    const Vec2 foot = a + ab * tc;
    if ((p - foot).norm() <= tol) picks.push_back({id, tc});
  }
  std::stable_sort(picks.begin(), picks.end(), [](const Pick& u, const Pick& v) {
    if (u.t != v.t) return u.t < v.t;
    return u.id < v.id;
  });
  std::vector<int> ids;
  ids.reserve(picks.size());
  for (const Pick& p : picks) ids.push_back(p.id);
  if (ids.empty()) throw MeshError("material_line: no nodes near the segment");
  return ids;
}

}  // namespace ecae
