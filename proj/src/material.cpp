#include "ecae/material.hpp"

#include <cmath>

namespace ecae {

std::array<std::array<double, 4>, 4> elastic_tangent(const MaterialParams& p) {
  const double mu = p.mu(), lam = p.lambda();
  std::array<std::array<double, 4>, 4> C{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) C[i][j] = lam + (i == j ? 2.0 * mu : 0.0);
  C[3][3] = mu;
  return C;
}

RadialReturnResult radial_return_with_tangent(const MaterialPointState& state,
                                              const std::array<double, 4>& dstrain,
                                              const MaterialParams& p) {
  for (double v : dstrain)
    if (!std::isfinite(v)) throw MaterialError("radial_return: non-finite strain increment");
  for (double v : state.sigma)
    if (!std::isfinite(v)) throw MaterialError("radial_return: non-finite stress state");

  RadialReturnResult r;
  r.state = radial_return(state, dstrain, p);
  r.plastic = r.state.eqps > state.eqps;
  if (!r.plastic) {
    r.tangent = elastic_tangent(p);
    return r;
  }

  // Simo-Hughes consistent tangent for the return map, in the deviatoric
  // norm metric: theta scales the deviator, theta_bar the n x n dyad.
  const double mu = p.mu(), K = p.bulk();
  const double tr = dstrain[0] + dstrain[1] + dstrain[2];
  const double lam = p.lambda();
  std::array<double, 4> trial;
  trial[0] = state.sigma[0] + lam * tr + 2.0 * mu * dstrain[0];
  trial[1] = state.sigma[1] + lam * tr + 2.0 * mu * dstrain[1];
  trial[2] = state.sigma[2] + lam * tr + 2.0 * mu * dstrain[2];
  trial[3] = state.sigma[3] + mu * dstrain[3];
  const double pm = (trial[0] + trial[1] + trial[2]) / 3.0;
  const std::array<double, 4> s{trial[0] - pm, trial[1] - pm, trial[2] - pm, trial[3]};
  const double snorm = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + 2.0 * s[3] * s[3]);
  const std::array<double, 4> n{s[0] / snorm, s[1] / snorm, s[2] / snorm, s[3] / snorm};

  const double q_trial = std::sqrt(1.5) * snorm;
  const double yield = p.sigma_y0 + p.H * state.eqps;
  const double dlambda = std::sqrt(1.5) * (q_trial - yield) / (3.0 * mu + p.H);
  const double theta = 1.0 - 2.0 * mu * dlambda / snorm;
  const double theta_bar = 1.0 / (1.0 + p.H / (3.0 * mu)) - (1.0 - theta);

  // Voigt: I_dev acting on (exx,eyy,ezz,gxy) and the n x n dyad.
  auto& D = r.tangent;
  const double ivol[4] = {1.0, 1.0, 1.0, 0.0};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double isym = (i == j) ? (i == 3 ? 0.5 : 1.0) : 0.0;
      const double idev = isym - ivol[i] * ivol[j] / 3.0;
      D[i][j] = K * ivol[i] * ivol[j] + 2.0 * mu * theta * idev -
                2.0 * mu * theta_bar * n[i] * n[j];
    }
  }
  return r;
}

double linear_fit_hardening(double K, double n, double strain_lo, double strain_hi,
                            int samples) {
  if (!(K > 0.0)) throw MaterialError("hardening fit: K must be positive");
  if (!(n > 0.0 && n <= 1.0)) throw MaterialError("hardening fit: n must be in (0, 1]");
  if (strain_lo < 0.0) throw MaterialError("hardening fit: strain_lo must be non-negative");
  if (!(strain_hi > strain_lo)) throw MaterialError("hardening fit: strain_hi must exceed strain_lo");
  if (samples < 2) throw MaterialError("hardening fit: need at least 2 samples");

  double se = 0.0, ss = 0.0, see = 0.0, ses = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double eps = strain_lo + (strain_hi - strain_lo) * i / (samples - 1);
    const double sig = K * std::pow(eps, n);
    se += eps;
    ss += sig;
    see += eps * eps;
    ses += eps * sig;
  }
  const double N = samples;
  return (ses - se * ss / N) / (see - se * se / N);
}

}  // namespace ecae
