#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCore>
#include <vector>

#include "ecae/element.hpp"
#include "ecae/mesh.hpp"

namespace ecae {

struct AssemblyError : std::runtime_error {
  AssemblyError(const std::string& msg, int elem) : std::runtime_error(msg), element(elem) {}
  int element;
};

// Assembled internal-force system over one trial increment. The tangent is
// the exact Jacobian of f_int with respect to the current coordinates.
struct GlobalSystem {
  Eigen::SparseMatrix<double> tangent;  // 2n x 2n
  Eigen::VectorXd f_int;                // 2n
  Eigen::VectorXd f_char;               // sum of |element contributions|, for scaling
  std::vector<ElementState> states_trial;
};

// Element loops run in parallel over disjoint per-element buffers; the
// scatter into the global operators is serial in ascending element order,
// so results are bitwise identical for any worker count.
GlobalSystem assemble(const Mesh& mesh, const std::vector<Vec2>& coords_prev,
                      const std::vector<Vec2>& coords_cur,
                      const std::vector<ElementState>& states_n, const MaterialParams& mat,
                      const ElementFormulation& form, int n_threads = 0);

// Plain single-thread reference used by tests and the benchmark.
GlobalSystem assemble_serial(const Mesh& mesh, const std::vector<Vec2>& coords_prev,
                             const std::vector<Vec2>& coords_cur,
                             const std::vector<ElementState>& states_n,
                             const MaterialParams& mat, const ElementFormulation& form);

struct ResidualOnly {
  Eigen::VectorXd f_int;
  Eigen::VectorXd f_char;
  std::vector<ElementState> states_trial;
};

ResidualOnly assemble_residual(const Mesh& mesh, const std::vector<Vec2>& coords_prev,
                               const std::vector<Vec2>& coords_cur,
                               const std::vector<ElementState>& states_n,
                               const MaterialParams& mat, const ElementFormulation& form,
                               int n_threads = 0);

}  // namespace ecae
