#include <cmath>
#include <fstream>

#include "doctest.h"
#include "ecae/material.hpp"
#include "json.hpp"

using namespace ecae;

namespace {

struct Lcg {
  uint64_t s = 0x2545f4914f6cdd1dull;
  double next() {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    return double(s >> 11) / double(1ull << 53);
  }
  double range(double lo, double hi) { return lo + (hi - lo) * next(); }
};

MaterialParams paper_material() {
  MaterialParams p;
  p.E = 200e9;
  p.nu = 0.3;
  p.sigma_y0 = 400e6;
  p.H = 5e6;
  return p;
}

std::array<double, 4> apply(const std::array<std::array<double, 4>, 4>& D,
                            const std::array<double, 4>& e) {
  std::array<double, 4> r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i] += D[i][j] * e[j];
  return r;
}

// In-plane tensor rotation of a (xx, yy, zz, xy) Voigt vector.
std::array<double, 4> rotate_state(const std::array<double, 4>& v, double theta,
                                   bool engineering_shear) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double xy = engineering_shear ? 0.5 * v[3] : v[3];
  const double xx = v[0], yy = v[1];
  const double rxx = c * c * xx + s * s * yy - 2.0 * c * s * xy;
  const double ryy = s * s * xx + c * c * yy + 2.0 * c * s * xy;
  const double rxy = c * s * (xx - yy) + (c * c - s * s) * xy;
  return {rxx, ryy, v[2], engineering_shear ? 2.0 * rxy : rxy};
}

}  // namespace

TEST_CASE("zero strain increment leaves the state unchanged") {
  const MaterialParams p = paper_material();
  MaterialPointState s;
  s.sigma = {120e6, -40e6, 20e6, 35e6};
  s.eqps = 0.01;
  const auto r = radial_return_with_tangent(s, {0, 0, 0, 0}, p);
  for (int c = 0; c < 4; ++c) CHECK(r.state.sigma[c] == doctest::Approx(s.sigma[c]));
  CHECK(r.state.eqps == s.eqps);
  const auto Ce = elastic_tangent(p);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(r.tangent[i][j] == doctest::Approx(Ce[i][j]));
}

TEST_CASE("elastic step reproduces C : de exactly") {
  const MaterialParams p = paper_material();
  MaterialPointState s;
  const std::array<double, 4> de{4e-4, -1e-4, 0.0, 3e-4};
  const auto r = radial_return_with_tangent(s, de, p);
  CHECK(!r.plastic);
  const auto expected = apply(elastic_tangent(p), de);
  for (int c = 0; c < 4; ++c)
    CHECK(r.state.sigma[c] == doctest::Approx(expected[c]).epsilon(1e-14));
}

TEST_CASE("plane-strain extension past yield matches a sub-incremented oracle") {
  const MaterialParams p = paper_material();
  const std::array<double, 4> total{0.05, 0.0, 0.0, 0.0};  // far past first yield

  MaterialPointState one;
  for (int c = 0; c < 4; ++c) one.sigma[c] = 0.0;
  const auto big = radial_return(one, total, p);

  MaterialPointState many;
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    std::array<double, 4> de;
    for (int c = 0; c < 4; ++c) de[c] = total[c] / n;
    many = radial_return(many, de, p);
  }
  for (int c = 0; c < 4; ++c)
    CHECK(big.sigma[c] == doctest::Approx(many.sigma[c]).epsilon(1e-6));
  CHECK(big.eqps == doctest::Approx(many.eqps).epsilon(1e-6));
  CHECK(big.eqps > 0.0);
  CHECK(von_mises(big.sigma) ==
        doctest::Approx(p.sigma_y0 + p.H * big.eqps).epsilon(1e-10));
}

TEST_CASE("algorithmic tangent matches finite differences on both branches") {
  const MaterialParams p = paper_material();
  Lcg rng;
  for (int trial = 0; trial < 40; ++trial) {
    MaterialPointState s;
    for (int c = 0; c < 4; ++c) s.sigma[c] = rng.range(-2e8, 2e8);
    s.eqps = rng.range(0.0, 0.5);
    std::array<double, 4> de;
    for (int c = 0; c < 4; ++c) de[c] = rng.range(-4e-3, 4e-3);

    const auto r = radial_return_with_tangent(s, de, p);
    // Skip states straddling the elastic/plastic switch within the stencil.
    const double q = von_mises(radial_return(s, de, p).sigma);
    const double yield = p.sigma_y0 + p.H * r.state.eqps;
    if (std::abs(q - yield) < 1e-3 * p.sigma_y0 && !r.plastic) continue;

    const double h = 1e-8;
    for (int j = 0; j < 4; ++j) {
      auto dp = de, dm = de;
      dp[j] += h;
      dm[j] -= h;
      const auto sp = radial_return(s, dp, p);
      const auto sm = radial_return(s, dm, p);
      if ((sp.eqps > s.eqps) != (sm.eqps > s.eqps)) continue;  // stencil crosses the kink
      for (int i = 0; i < 4; ++i) {
        const double fd = (sp.sigma[i] - sm.sigma[i]) / (2 * h);
        CHECK(r.tangent[i][j] == doctest::Approx(fd).epsilon(1e-5).scale(p.E));
      }
    }
  }
}

TEST_CASE("radial return is isotropic under in-plane rotation") {
  const MaterialParams p = paper_material();
  const std::array<double, 4> de{3e-3, -1.2e-3, 0.0, 2.4e-3};  // plastic magnitude
  for (double theta : {0.3, 1.1, -0.7}) {
    MaterialPointState zero;
    const auto direct = radial_return(zero, rotate_state(de, theta, true), p);
    const auto rotated = rotate_state(radial_return(zero, de, p).sigma, theta, false);
    for (int c = 0; c < 4; ++c)
      CHECK(direct.sigma[c] == doctest::Approx(rotated[c]).epsilon(1e-12).scale(p.sigma_y0));
  }
}

TEST_CASE("plastic strain increment is traceless and radial") {
  const MaterialParams p = paper_material();
  Lcg rng;
  for (int trial = 0; trial < 20; ++trial) {
    MaterialPointState s;
    for (int c = 0; c < 4; ++c) s.sigma[c] = rng.range(-1e8, 1e8);
    s.eqps = rng.range(0.0, 0.2);
    std::array<double, 4> de{rng.range(-6e-3, 6e-3), rng.range(-6e-3, 6e-3),
                             rng.range(-6e-3, 6e-3), rng.range(-6e-3, 6e-3)};
    const auto r = radial_return(s, de, p);
    if (!(r.eqps > s.eqps)) continue;

    // dep = de - C^-1 dsigma; trace must vanish.
    const double mu = p.mu(), lam = p.lambda();
    std::array<double, 4> dsig;
    for (int c = 0; c < 4; ++c) dsig[c] = r.sigma[c] - s.sigma[c];
    const double tr_s = dsig[0] + dsig[1] + dsig[2];
    const double K3 = 3.0 * lam + 2.0 * mu;
    std::array<double, 4> dee;
    for (int c = 0; c < 3; ++c) dee[c] = (dsig[c] - lam * tr_s / K3) / (2.0 * mu);
    dee[3] = dsig[3] / mu;
    std::array<double, 4> dep;
    double norm = 0.0;
    for (int c = 0; c < 4; ++c) {
      dep[c] = de[c] - dee[c];
      norm += dep[c] * dep[c];
    }
    CHECK(std::abs(dep[0] + dep[1] + dep[2]) < 1e-10 * std::sqrt(norm));

    // Deviatoric direction of the return matches the trial deviator.
    const double tr_t = de[0] + de[1] + de[2];
    std::array<double, 4> trial;
    for (int c = 0; c < 3; ++c) trial[c] = s.sigma[c] + lam * tr_t + 2.0 * mu * de[c];
    trial[3] = s.sigma[3] + mu * de[3];
    const double pm_t = (trial[0] + trial[1] + trial[2]) / 3.0;
    const double pm_n = (r.sigma[0] + r.sigma[1] + r.sigma[2]) / 3.0;
    std::array<double, 4> st{trial[0] - pm_t, trial[1] - pm_t, trial[2] - pm_t, trial[3]};
    std::array<double, 4> sn{r.sigma[0] - pm_n, r.sigma[1] - pm_n, r.sigma[2] - pm_n,
                             r.sigma[3]};
    double dot = 0.0, nt = 0.0, nn = 0.0;
    for (int c = 0; c < 4; ++c) {
      const double w = c == 3 ? 2.0 : 1.0;
      dot += w * st[c] * sn[c];
      nt += w * st[c] * st[c];
      nn += w * sn[c] * sn[c];
    }
    CHECK(dot / std::sqrt(nt * nn) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("hardening fit: linear power law is recovered exactly") {
  const double H = 740e6;
  CHECK(linear_fit_hardening(H, 1.0, 0.05, 1.0) == doctest::Approx(H).epsilon(1e-12));
}

TEST_CASE("hardening fit matches the continuous least-squares oracle") {
  const double K = 900e6, n = 0.5, a = 0.05, b = 1.0;
  // Closed-form least-squares slope over [a, b].
  auto ipow = [](double x, double p) { return std::pow(x, p); };
  const double len = b - a;
  const double m_e = (b * b - a * a) / (2 * len);
  const double m_e2 = (b * b * b - a * a * a) / (3 * len);
  const double m_s = K * (ipow(b, n + 1) - ipow(a, n + 1)) / ((n + 1) * len);
  const double m_es = K * (ipow(b, n + 2) - ipow(a, n + 2)) / ((n + 2) * len);
  const double oracle = (m_es - m_e * m_s) / (m_e2 - m_e * m_e);
  CHECK(linear_fit_hardening(K, n, a, b, 2000) == doctest::Approx(oracle).epsilon(1e-5));
  CHECK(linear_fit_hardening(K, n, a, b, 100) == doctest::Approx(oracle).epsilon(2e-3));
}

TEST_CASE("hardening fits of handbook alloys land near the reported rates") {
  std::ifstream f(std::string(ECAE_DATA_DIR) + "/power_law_alloys.json");
  REQUIRE(f.good());
  nlohmann::json alloys = nlohmann::json::parse(f);
  const struct {
    const char* name;
    double expected;
  } targets[] = {{"aluminum_alloy", 70e6}, {"stainless_steel", 900e6}, {"cobalt_alloy", 1500e6}};
  for (const auto& t : targets) {
    const auto& a = alloys.at(t.name);
    const double fit = linear_fit_hardening(a.at("K").get<double>(), a.at("n").get<double>());
    CHECK(std::abs(fit - t.expected) < 0.15 * t.expected);
  }
}

TEST_CASE("hardening fit rejects bad arguments") {
  CHECK_THROWS_AS(linear_fit_hardening(-1.0, 0.5), MaterialError);
  CHECK_THROWS_AS(linear_fit_hardening(1e9, 1.5), MaterialError);
  CHECK_THROWS_AS(linear_fit_hardening(1e9, 0.5, -0.1, 1.0), MaterialError);
  CHECK_THROWS_AS(linear_fit_hardening(1e9, 0.5, 0.5, 0.1), MaterialError);
  CHECK_NOTHROW(linear_fit_hardening(1e9, 0.5, 0.0, 1.0));  // zero lower bound is fine
}

TEST_CASE("non-finite inputs are rejected") {
  MaterialPointState s;
  CHECK_THROWS_AS(
      radial_return_with_tangent(s, {std::nan(""), 0, 0, 0}, paper_material()),
      MaterialError);
}
