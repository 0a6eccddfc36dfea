#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecae/vec2.hpp"

namespace ecae {

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BilletSpec {
  double width = 0.025;              // [m], W1 minus the lateral clearances
  double length = 0.55;              // [m]
  double target_element_size = 1e-3; // [m]
  double clearance = 1e-6;           // [m], initial gap to the die walls

  void validate() const;
};

enum class Face { Left, Right, Top, Bottom };

// Structured grid of 4-node quadrilaterals over the rectangular billet,
// generated in billet-local coordinates [0,width] x [0,length]. Node ids
// are j*(nx+1)+i with i across the width and j along the length; element
// connectivity is counter-clockwise. Immutable after generation; deformed
// coordinates live in snapshots.
struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 4>> elems;
  int nx = 0, ny = 0;
  double hx = 0.0, hy = 0.0;

  // Exclusive boundary sets; corner membership follows the precedence
  // Left > Right > Top > Bottom.
  std::vector<int> set_left, set_right, set_top, set_bottom;

  int node_id(int i, int j) const { return j * (nx + 1) + i; }
  int n_nodes() const { return int(nodes.size()); }
  int n_elems() const { return int(elems.size()); }
  double element_size() const { return hx < hy ? hx : hy; }

  // Full structured rows/columns, corners included, ordered by the running
  // index. Load phases address these rather than the exclusive sets.
  std::vector<int> column(int i) const;
  std::vector<int> row(int j) const;

  const std::vector<int>& face_set(Face f) const;
  std::vector<int> boundary_nodes() const;  // all exterior nodes, ascending id
};

Mesh generate_mesh(const BilletSpec& spec);

// Node ids nearest the reference segment a-b, ordered from a to b.
// a and b are billet-local material coordinates.
std::vector<int> material_line(const Mesh& mesh, const Vec2& a, const Vec2& b);

}  // namespace ecae
