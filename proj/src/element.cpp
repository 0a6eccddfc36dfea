#include "ecae/element.hpp"

namespace ecae {

ElementResult element_internal_force(const std::array<Vec2, 4>& x_prev,
                                     const std::array<Vec2, 4>& x_cur,
                                     const ElementState& state_n, const MaterialParams& mat,
                                     const ElementFormulation& form) {
  std::array<double, 8> xp;
  std::array<Dual8, 8> xc;
  for (int a = 0; a < 4; ++a) {
    xp[2 * a] = x_prev[a].x;
    xp[2 * a + 1] = x_prev[a].y;
    xc[2 * a] = Dual8::seed(x_cur[a].x, 2 * a);
    xc[2 * a + 1] = Dual8::seed(x_cur[a].y, 2 * a + 1);
  }
  const auto out = detail::element_kernel(xp, xc, state_n, mat, form);

  ElementResult r;
  for (int i = 0; i < 8; ++i) {
    r.f[i] = out.f[i].v;
    for (int k = 0; k < 8; ++k) r.k[i][k] = out.f[i].d[k];
  }
  for (int g = 0; g < 4; ++g) {
    for (int c = 0; c < 4; ++c) r.state.gp[g].sigma[c] = out.gp[g].sigma[c].v;
    r.state.gp[g].eqps = out.gp[g].eqps.v;
  }
  r.state.hg_force = {out.hg_force[0].v, out.hg_force[1].v};
  return r;
}

ElementForceOnly element_internal_force_only(const std::array<Vec2, 4>& x_prev,
                                             const std::array<Vec2, 4>& x_cur,
                                             const ElementState& state_n,
                                             const MaterialParams& mat,
                                             const ElementFormulation& form) {
  std::array<double, 8> xp, xc;
  for (int a = 0; a < 4; ++a) {
    xp[2 * a] = x_prev[a].x;
    xp[2 * a + 1] = x_prev[a].y;
    xc[2 * a] = x_cur[a].x;
    xc[2 * a + 1] = x_cur[a].y;
  }
  const auto out = detail::element_kernel(xp, xc, state_n, mat, form);
  ElementForceOnly r;
  r.f = out.f;
  for (int g = 0; g < 4; ++g) r.state.gp[g] = out.gp[g];
  r.state.hg_force = {out.hg_force[0], out.hg_force[1]};
  return r;
}

}  // namespace ecae
