#include "ecae/assembly.hpp"

#include <omp.h>

#include <cmath>

namespace ecae {

namespace {

std::array<Vec2, 4> gather(const std::vector<Vec2>& coords, const std::array<int, 4>& conn) {
  return {coords[conn[0]], coords[conn[1]], coords[conn[2]], coords[conn[3]]};
}

void check_finite(const std::vector<Vec2>& coords) {
  for (const Vec2& p : coords)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw AssemblyError("assemble: non-finite trial coordinates", -1);
}

}  // namespace

GlobalSystem assemble(const Mesh& mesh, const std::vector<Vec2>& coords_prev,
                      const std::vector<Vec2>& coords_cur,
                      const std::vector<ElementState>& states_n, const MaterialParams& mat,
                      const ElementFormulation& form, int n_threads) {
  check_finite(coords_cur);
  const int ne = mesh.n_elems();
  const int ndof = 2 * mesh.n_nodes();

  std::vector<ElementResult> results(ne);
  std::vector<int> failed(ne, 0);

  if (n_threads <= 0) n_threads = omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(n_threads)
  for (int e = 0; e < ne; ++e) {
    try {
      results[e] = element_internal_force(gather(coords_prev, mesh.elems[e]),
                                          gather(coords_cur, mesh.elems[e]), states_n[e], mat,
                                          form);
    } catch (const InvertedElementError&) {
      failed[e] = 1;
    }
  }
  for (int e = 0; e < ne; ++e)
    if (failed[e])
      throw AssemblyError("assemble: inverted element " + std::to_string(e), e);

  GlobalSystem sys;
  sys.f_int = Eigen::VectorXd::Zero(ndof);
  sys.f_char = Eigen::VectorXd::Zero(ndof);
  sys.states_trial.resize(ne);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(size_t(ne) * 64);
  for (int e = 0; e < ne; ++e) {
    const auto& conn = mesh.elems[e];
    const ElementResult& r = results[e];
    sys.states_trial[e] = r.state;
    int dofs[8];
    for (int a = 0; a < 4; ++a) {
      dofs[2 * a] = 2 * conn[a];
      dofs[2 * a + 1] = 2 * conn[a] + 1;
    }
    for (int i = 0; i < 8; ++i) {
      sys.f_int[dofs[i]] += r.f[i];
      sys.f_char[dofs[i]] += std::abs(r.f[i]);
      for (int j = 0; j < 8; ++j) trips.emplace_back(dofs[i], dofs[j], r.k[i][j]);
    }
  }
  sys.tangent.resize(ndof, ndof);
  sys.tangent.setFromTriplets(trips.begin(), trips.end());
  return sys;
}

GlobalSystem assemble_serial(const Mesh& mesh, const std::vector<Vec2>& coords_prev,
                             const std::vector<Vec2>& coords_cur,
                             const std::vector<ElementState>& states_n,
                             const MaterialParams& mat, const ElementFormulation& form) {
  check_finite(coords_cur);
  const int ne = mesh.n_elems();
  const int ndof = 2 * mesh.n_nodes();
  GlobalSystem sys;
  sys.f_int = Eigen::VectorXd::Zero(ndof);
  sys.f_char = Eigen::VectorXd::Zero(ndof);
  sys.states_trial.resize(ne);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(size_t(ne) * 64);
  for (int e = 0; e < ne; ++e) {
    const auto& conn = mesh.elems[e];
    ElementResult r;
    try {
      r = element_internal_force(gather(coords_prev, conn), gather(coords_cur, conn),
                                 states_n[e], mat, form);
    } catch (const InvertedElementError&) {
      throw AssemblyError("assemble: inverted element " + std::to_string(e), e);
    }
    sys.states_trial[e] = r.state;
    int dofs[8];
    for (int a = 0; a < 4; ++a) {
      dofs[2 * a] = 2 * conn[a];
      dofs[2 * a + 1] = 2 * conn[a] + 1;
    }
    for (int i = 0; i < 8; ++i) {
      sys.f_int[dofs[i]] += r.f[i];
      sys.f_char[dofs[i]] += std::abs(r.f[i]);
      for (int j = 0; j < 8; ++j) trips.emplace_back(dofs[i], dofs[j], r.k[i][j]);
    }
  }
  sys.tangent.resize(ndof, ndof);
  sys.tangent.setFromTriplets(trips.begin(), trips.end());
  return sys;
}

ResidualOnly assemble_residual(const Mesh& mesh, const std::vector<Vec2>& coords_prev,
                               const std::vector<Vec2>& coords_cur,
                               const std::vector<ElementState>& states_n,
                               const MaterialParams& mat, const ElementFormulation& form,
                               int n_threads) {
  check_finite(coords_cur);
  const int ne = mesh.n_elems();
  const int ndof = 2 * mesh.n_nodes();
  std::vector<ElementForceOnly> results(ne);
  std::vector<int> failed(ne, 0);
  if (n_threads <= 0) n_threads = omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(n_threads)
  for (int e = 0; e < ne; ++e) {
    try {
      results[e] = element_internal_force_only(gather(coords_prev, mesh.elems[e]),
                                               gather(coords_cur, mesh.elems[e]), states_n[e],
                                               mat, form);
    } catch (const InvertedElementError&) {
      failed[e] = 1;
    }
  }
  for (int e = 0; e < ne; ++e)
    if (failed[e])
      throw AssemblyError("assemble: inverted element " + std::to_string(e), e);

  ResidualOnly out;
  out.f_int = Eigen::VectorXd::Zero(ndof);
  out.f_char = Eigen::VectorXd::Zero(ndof);
  out.states_trial.resize(ne);
  for (int e = 0; e < ne; ++e) {
    const auto& conn = mesh.elems[e];
    out.states_trial[e] = results[e].state;
    for (int a = 0; a < 4; ++a) {
      out.f_int[2 * conn[a]] += results[e].f[2 * a];
      out.f_int[2 * conn[a] + 1] += results[e].f[2 * a + 1];
      out.f_char[2 * conn[a]] += std::abs(results[e].f[2 * a]);
      out.f_char[2 * conn[a] + 1] += std::abs(results[e].f[2 * a + 1]);
    }
  }
  return out;
}

}  // namespace ecae
