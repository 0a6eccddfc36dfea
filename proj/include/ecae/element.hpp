#pragma once

#include <array>
#include <stdexcept>

#include "ecae/dual.hpp"
#include "ecae/material.hpp"
#include "ecae/vec2.hpp"

namespace ecae {

struct InvertedElementError : std::runtime_error {
  using std::runtime_error::runtime_error;
  int element = -1;
};

enum class Integration { SelectiveReducedBbar, SinglePointHourglass };

struct ElementFormulation {
  Integration integration = Integration::SelectiveReducedBbar;
  double hourglass_coefficient = 0.03;  // used only for SinglePointHourglass

  int n_gp() const { return integration == Integration::SelectiveReducedBbar ? 4 : 1; }

  void validate() const {
    if (integration == Integration::SinglePointHourglass &&
        !(hourglass_coefficient > 0.0 && hourglass_coefficient <= 0.1))
      throw std::runtime_error("fem: hourglass_coefficient must be in (0, 0.1]");
  }
};

// Per-element history: integration-point states plus the accumulated
// hourglass generalized force (single-point integration only).
struct ElementState {
  std::array<MaterialPointState, 4> gp{};
  Vec2 hg_force{};
};

struct ElementResult {
  std::array<double, 8> f{};                   // internal force, dof order (u1x,u1y,...)
  std::array<std::array<double, 8>, 8> k{};    // exact d f / d x_cur
  ElementState state;
};

namespace detail {

// 2x2 Gauss points and the element center, in (xi, eta).
inline constexpr double kGp = 0.57735026918962576451;  // 1/sqrt(3)
inline constexpr double kXi[4] = {-1.0, 1.0, 1.0, -1.0};
inline constexpr double kEta[4] = {-1.0, -1.0, 1.0, 1.0};

template <typename S>
struct Grad4 {
  std::array<S, 4> dx, dy;  // dN_a/dx, dN_a/dy
  S detJ;
};

// Shape-function gradients of the bilinear quad at (xi,eta) with respect to
// the configuration given by coords.
template <typename S>
Grad4<S> quad_gradients(const std::array<S, 8>& coords, double xi, double eta) {
  std::array<double, 4> dxi, deta;
  for (int a = 0; a < 4; ++a) {
    dxi[a] = 0.25 * kXi[a] * (1.0 + eta * kEta[a]);
    deta[a] = 0.25 * kEta[a] * (1.0 + xi * kXi[a]);
  }
  S j00{}, j01{}, j10{}, j11{};  // J_ik = d x_k / d xi_i
  for (int a = 0; a < 4; ++a) {
    j00 += dxi[a] * coords[2 * a];
    j01 += dxi[a] * coords[2 * a + 1];
    j10 += deta[a] * coords[2 * a];
    j11 += deta[a] * coords[2 * a + 1];
  }
  Grad4<S> g;
  g.detJ = j00 * j11 - j01 * j10;
  const S inv_det = S(1.0) / g.detJ;
  // dN/dx_k = invJ_ik dN/dxi_i with invJ = adj(J)/det.
  for (int a = 0; a < 4; ++a) {
    g.dx[a] = (j11 * dxi[a] - j10 * deta[a]) * inv_det;
    g.dy[a] = (j00 * deta[a] - j01 * dxi[a]) * inv_det;
  }
  return g;
}

template <typename S>
struct KernelOut {
  std::array<S, 8> f{};
  std::array<StressStateT<S>, 4> gp{};
  std::array<S, 2> hg_force{};
};

// Updated-Lagrangian internal force over one increment x_prev -> x_cur.
// Strain and spin increments use midpoint (Hughes-Winget) kinematics, the
// stored stress is corotated by the Cayley rotation of the increment spin,
// and the radial return is applied at each integration point.
template <typename S>
KernelOut<S> element_kernel(const std::array<double, 8>& x_prev, const std::array<S, 8>& x_cur,
                            const ElementState& state_n, const MaterialParams& mat,
                            const ElementFormulation& form) {
  KernelOut<S> out;
  const int ngp = form.n_gp();
  std::array<S, 8> x_mid;
  std::array<S, 8> du;
  for (int i = 0; i < 8; ++i) {
    du[i] = x_cur[i] - x_prev[i];
    x_mid[i] = S(0.5) * (x_cur[i] + x_prev[i]);
  }

  struct GpData {
    Grad4<S> mid, cur;
    S g00, g01, g10, g11;  // G_jk = d du_j / d x_k at midpoint
    double w;
    double xi, eta;
  };
  std::array<GpData, 4> gps;
  S vol_mid{}, dil_mean{};
  for (int g = 0; g < ngp; ++g) {
    GpData& q = gps[g];
    if (ngp == 4) {
      q.xi = kGp * kXi[g];
      q.eta = kGp * kEta[g];
      q.w = 1.0;
    } else {
      q.xi = q.eta = 0.0;
      q.w = 4.0;
    }
    q.mid = quad_gradients(x_mid, q.xi, q.eta);
    q.cur = quad_gradients(x_cur, q.xi, q.eta);
    if (value_of(q.mid.detJ) <= 0.0 || value_of(q.cur.detJ) <= 0.0)
      throw InvertedElementError("element: non-positive Jacobian");
    q.g00 = q.g01 = q.g10 = q.g11 = S(0.0);
    for (int a = 0; a < 4; ++a) {
      q.g00 += du[2 * a] * q.mid.dx[a];
      q.g01 += du[2 * a] * q.mid.dy[a];
      q.g10 += du[2 * a + 1] * q.mid.dx[a];
      q.g11 += du[2 * a + 1] * q.mid.dy[a];
    }
    vol_mid += q.w * q.mid.detJ;
    dil_mean += q.w * q.mid.detJ * (q.g00 + q.g11);
  }
  dil_mean /= vol_mid;

  // Current-configuration dilatational row for the B-bar force term.
  std::array<S, 8> b_cur_mean{};
  S vol_cur{};
  if (ngp == 4) {
    for (int g = 0; g < ngp; ++g) {
      const GpData& q = gps[g];
      const S dv = q.w * q.cur.detJ;
      vol_cur += dv;
      for (int a = 0; a < 4; ++a) {
        b_cur_mean[2 * a] += dv * q.cur.dx[a];
        b_cur_mean[2 * a + 1] += dv * q.cur.dy[a];
      }
    }
    for (int i = 0; i < 8; ++i) b_cur_mean[i] /= vol_cur;
  }

  for (int g = 0; g < ngp; ++g) {
    const GpData& q = gps[g];
    // Objective strain increment; mean dilatation replaces the pointwise
    // one for the B-bar formulation.
    std::array<S, 4> deps;
    deps[0] = q.g00;
    deps[1] = q.g11;
    deps[2] = S(0.0);
    deps[3] = q.g01 + q.g10;
    if (ngp == 4) {
      const S corr = (dil_mean - (q.g00 + q.g11)) * (1.0 / 3.0);
      deps[0] += corr;
      deps[1] += corr;
      deps[2] += corr;
    }

    // Cayley rotation of the stored stress by the increment spin.
    const S w12 = S(0.5) * (q.g01 - q.g10);
    const S c = S(0.5) * w12;
    const S den = S(1.0) + c * c;
    const S r00 = (S(1.0) - c * c) / den;
    const S r01 = S(2.0) * c / den;  // R = [[r00, r01], [-r01, r00]]
    const MaterialPointState& s0 = state_n.gp[g];
    StressStateT<S> rotated;
    const S sxx = s0.sigma[0], syy = s0.sigma[1], sxy = s0.sigma[3];
    rotated.sigma[0] = r00 * (r00 * sxx + r01 * sxy) + r01 * (r00 * sxy + r01 * syy);
    rotated.sigma[1] = r01 * (r01 * sxx - r00 * sxy) + r00 * (r00 * syy - r01 * sxy);
    rotated.sigma[3] = r00 * (r00 * sxy + r01 * syy) - r01 * (r00 * sxx + r01 * sxy);
    rotated.sigma[2] = S(s0.sigma[2]);
    rotated.eqps = S(s0.eqps);

    out.gp[g] = radial_return(rotated, deps, mat);
    const std::array<S, 4>& sig = out.gp[g].sigma;

    const S dv = q.w * q.cur.detJ;
    const S press3 = sig[0] + sig[1] + sig[2];
    for (int a = 0; a < 4; ++a) {
      S cx{}, cy{};
      if (ngp == 4) {
        cx = (b_cur_mean[2 * a] - q.cur.dx[a]) * (1.0 / 3.0);
        cy = (b_cur_mean[2 * a + 1] - q.cur.dy[a]) * (1.0 / 3.0);
      }
      out.f[2 * a] += dv * (q.cur.dx[a] * sig[0] + q.cur.dy[a] * sig[3] + cx * press3);
      out.f[2 * a + 1] += dv * (q.cur.dy[a] * sig[1] + q.cur.dx[a] * sig[3] + cy * press3);
    }
  }

  // Flanagan-Belytschko stiffness hourglass control for the single-point
  // element; gamma is orthogonalized against the linear field on the
  // current configuration.
  if (ngp == 1) {
    static constexpr double h[4] = {1.0, -1.0, 1.0, -1.0};
    const GpData& q = gps[0];
    S hx{}, hy{};
    for (int a = 0; a < 4; ++a) {
      hx += h[a] * x_cur[2 * a];
      hy += h[a] * x_cur[2 * a + 1];
    }
    std::array<S, 4> gamma;
    S bb{};
    for (int a = 0; a < 4; ++a) {
      gamma[a] = h[a] - hx * q.cur.dx[a] - hy * q.cur.dy[a];
      bb += q.cur.dx[a] * q.cur.dx[a] + q.cur.dy[a] * q.cur.dy[a];
    }
    const S vol = q.w * q.cur.detJ;
    const S k_hg = form.hourglass_coefficient * mat.mu() * vol * bb;
    S qx{}, qy{};
    for (int a = 0; a < 4; ++a) {
      qx += gamma[a] * du[2 * a];
      qy += gamma[a] * du[2 * a + 1];
    }
    out.hg_force[0] = state_n.hg_force.x + k_hg * qx;
    out.hg_force[1] = state_n.hg_force.y + k_hg * qy;
    for (int a = 0; a < 4; ++a) {
      out.f[2 * a] += gamma[a] * out.hg_force[0];
      out.f[2 * a + 1] += gamma[a] * out.hg_force[1];
    }
  }
  return out;
}

}  // namespace detail

// Internal force, exact tangent d f/d x_cur, and trial history for one
// element over the increment x_prev -> x_cur (coordinates, not
// displacements; dof order u1x,u1y,...,u4y, nodes counter-clockwise).
ElementResult element_internal_force(const std::array<Vec2, 4>& x_prev,
                                     const std::array<Vec2, 4>& x_cur,
                                     const ElementState& state_n, const MaterialParams& mat,
                                     const ElementFormulation& form);

// Residual-only path (used by line search and serial reference assembly).
struct ElementForceOnly {
  std::array<double, 8> f{};
  ElementState state;
};
ElementForceOnly element_internal_force_only(const std::array<Vec2, 4>& x_prev,
                                             const std::array<Vec2, 4>& x_cur,
                                             const ElementState& state_n,
                                             const MaterialParams& mat,
                                             const ElementFormulation& form);

}  // namespace ecae
