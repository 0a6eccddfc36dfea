#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "ecae/dual.hpp"

namespace ecae {

struct MaterialError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MaterialParams {
  double E = 200e9;        // Young's modulus [Pa]
  double nu = 0.3;         // Poisson ratio
  double sigma_y0 = 400e6; // initial yield stress [Pa]
  double H = 5e6;          // linear hardening rate d(sigma_y)/d(eqps) [Pa]

  double mu() const { return 0.5 * E / (1.0 + nu); }
  double lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
  double bulk() const { return E / (3.0 * (1.0 - 2.0 * nu)); }

  void validate() const {
    if (!(E > 0.0)) throw MaterialError("material: E must be positive");
    if (!(nu > 0.0 && nu < 0.5)) throw MaterialError("material: nu must be in (0, 0.5)");
    if (!(sigma_y0 > 0.0)) throw MaterialError("material: sigma_y0 must be positive");
    if (H < 0.0) throw MaterialError("material: H must be non-negative");
  }
};

// Plane-strain stress state at one integration point. sigma_zz is carried
// explicitly; component order is (xx, yy, zz, xy). Strain vectors use the
// same order with engineering shear gamma_xy.
template <typename S>
struct StressStateT {
  std::array<S, 4> sigma{};
  S eqps{};
};

using MaterialPointState = StressStateT<double>;

template <typename S>
S von_mises(const std::array<S, 4>& sig) {
  const S p = (sig[0] + sig[1] + sig[2]) * (1.0 / 3.0);
  const S sx = sig[0] - p, sy = sig[1] - p, sz = sig[2] - p;
  return sqrt(S(1.5) * (sx * sx + sy * sy + sz * sz + S(2.0) * sig[3] * sig[3]));
}

// Closed-form radial return for J2 plasticity with linear isotropic
// hardening. Pure function of (state, strain increment, params); trivially
// parallel across integration points.
template <typename S>
StressStateT<S> radial_return(const StressStateT<S>& state, const std::array<S, 4>& dstrain,
                              const MaterialParams& p) {
  const double mu = p.mu(), lam = p.lambda();
  StressStateT<S> out;
  const S tr = dstrain[0] + dstrain[1] + dstrain[2];
  std::array<S, 4> trial;
  trial[0] = state.sigma[0] + lam * tr + 2.0 * mu * dstrain[0];
  trial[1] = state.sigma[1] + lam * tr + 2.0 * mu * dstrain[1];
  trial[2] = state.sigma[2] + lam * tr + 2.0 * mu * dstrain[2];
  trial[3] = state.sigma[3] + mu * dstrain[3];

  const S q_trial = von_mises(trial);
  const S yield = p.sigma_y0 + p.H * state.eqps;
  if (q_trial <= yield) {
    out.sigma = trial;
    out.eqps = state.eqps;
    return out;
  }
  const S dgamma = (q_trial - yield) / (3.0 * mu + p.H);
  const S scale = S(1.0) - (3.0 * mu) * dgamma / q_trial;
  const S pm = (trial[0] + trial[1] + trial[2]) * (1.0 / 3.0);
  out.sigma[0] = pm + scale * (trial[0] - pm);
  out.sigma[1] = pm + scale * (trial[1] - pm);
  out.sigma[2] = pm + scale * (trial[2] - pm);
  out.sigma[3] = scale * trial[3];
  out.eqps = state.eqps + dgamma;
  return out;
}

// Algorithmic (consistent) tangent d(sigma)/d(strain), 4x4 acting on
// (exx, eyy, ezz, gxy). Returned alongside the updated state.
struct RadialReturnResult {
  MaterialPointState state;
  std::array<std::array<double, 4>, 4> tangent;
  bool plastic = false;
};

RadialReturnResult radial_return_with_tangent(const MaterialPointState& state,
                                              const std::array<double, 4>& dstrain,
                                              const MaterialParams& params);

std::array<std::array<double, 4>, 4> elastic_tangent(const MaterialParams& params);

// Least-squares slope of sigma = K * eps^n sampled uniformly on
// [strain_lo, strain_hi]; used to reduce handbook power-law data to the
// linear hardening rate consumed by MaterialParams.
double linear_fit_hardening(double power_law_K, double power_law_n, double strain_lo = 0.05,
                            double strain_hi = 1.0, int samples = 100);

}  // namespace ecae
