// Benchmark of the OpenMP element/assembly kernels against the serial
// reference, plus a bitwise agreement check between the two paths.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "ecae/assembly.hpp"

using namespace ecae;

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 160;  // elements per side
  BilletSpec spec;
  spec.width = 0.025;
  spec.length = 0.025;
  spec.target_element_size = 0.025 / n;
  spec.clearance = 0.0;
  const Mesh mesh = generate_mesh(spec);
  std::printf("mesh: %d x %d = %d elements, %d dofs\n", mesh.nx, mesh.ny, mesh.n_elems(),
              2 * mesh.n_nodes());

  MaterialParams mat;
  ElementFormulation form;

  // Smooth deformation with enough strain to hit the plastic branch.
  std::vector<Vec2> prev = mesh.nodes, cur = mesh.nodes;
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    const Vec2 p = mesh.nodes[i];
    cur[i].x = p.x + 2e-3 * std::sin(200.0 * p.y) + 4e-3 * p.y;
    cur[i].y = p.y - 1.5e-3 * p.x + 2e-3 * std::cos(150.0 * p.x);
  }
  std::vector<ElementState> states(mesh.n_elems());

  const int reps = 5;
  double t0 = omp_get_wtime();
  GlobalSystem ref;
  for (int r = 0; r < reps; ++r) ref = assemble_serial(mesh, prev, cur, states, mat, form);
  const double t_serial = (omp_get_wtime() - t0) / reps;
  std::printf("serial reference:    %8.1f ms\n", 1e3 * t_serial);

  for (int threads : {1, 2, 4}) {
    if (threads > omp_get_max_threads()) continue;
    t0 = omp_get_wtime();
    GlobalSystem par;
    for (int r = 0; r < reps; ++r)
      par = assemble(mesh, prev, cur, states, mat, form, threads);
    const double t_par = (omp_get_wtime() - t0) / reps;

    bool identical = (par.f_int - ref.f_int).lpNorm<Eigen::Infinity>() == 0.0;
    Eigen::SparseMatrix<double> diff = par.tangent - ref.tangent;
    identical = identical && diff.coeffs().size() == 0
                    ? identical
                    : identical && diff.norm() == 0.0;
    std::printf("openmp %d thread(s):  %8.1f ms   speedup %.2fx   bitwise %s\n", threads,
                1e3 * t_par, t_serial / t_par, identical ? "identical" : "DIFFERS");
  }
  return 0;
}
