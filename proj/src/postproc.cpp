#include "ecae/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ecae {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt3 = 1.7320508075688772;

std::array<double, 4> shape_at(double xi, double eta) {
  using detail::kEta;
  using detail::kXi;
  std::array<double, 4> n;
  for (int a = 0; a < 4; ++a) n[a] = 0.25 * (1.0 + xi * kXi[a]) * (1.0 + eta * kEta[a]);
  return n;
}

std::array<double, 8> flat_coords(const std::vector<Vec2>& coords,
                                  const std::array<int, 4>& conn) {
  std::array<double, 8> x;
  for (int a = 0; a < 4; ++a) {
    x[2 * a] = coords[conn[a]].x;
    x[2 * a + 1] = coords[conn[a]].y;
  }
  return x;
}

std::vector<std::vector<int>> node_elements(const Mesh& mesh) {
  std::vector<std::vector<int>> adj(mesh.n_nodes());
  for (int e = 0; e < mesh.n_elems(); ++e)
    for (int a = 0; a < 4; ++a) adj[mesh.elems[e][a]].push_back(e);
  return adj;
}

}  // namespace

std::vector<std::array<double, 4>> recover_nodal_stress(const FieldSnapshot& snap,
                                                        const Mesh& mesh,
                                                        const ElementFormulation& form,
                                                        RecoveryMethod method) {
  const int nn = mesh.n_nodes();
  const int ngp = form.n_gp();
  std::vector<std::array<double, 4>> out(nn, {0, 0, 0, 0});

  if (method == RecoveryMethod::VolumeWeightedAverage) {
    // Corner extrapolation of gp values, volume-averaged over adjacent
    // elements. Exact for fields linear over the element.
    std::vector<double> wsum(nn, 0.0);
    for (int e = 0; e < mesh.n_elems(); ++e) {
      const auto& conn = mesh.elems[e];
      const auto xcur = flat_coords(snap.coords, conn);
      double vol = 0.0;
      if (ngp == 4) {
        for (int g = 0; g < 4; ++g) {
          const auto gr = detail::quad_gradients(xcur, detail::kGp * detail::kXi[g],
                                                 detail::kGp * detail::kEta[g]);
          vol += gr.detJ;
        }
      } else {
        vol = 4.0 * detail::quad_gradients(xcur, 0.0, 0.0).detJ;
      }
      for (int a = 0; a < 4; ++a) {
        std::array<double, 4> val{};
        if (ngp == 4) {
          for (int g = 0; g < 4; ++g) {
            const double m = 0.25 * (1.0 + kSqrt3 * detail::kXi[a] * detail::kXi[g]) *
                             (1.0 + kSqrt3 * detail::kEta[a] * detail::kEta[g]);
            for (int c = 0; c < 4; ++c) val[c] += m * snap.states[e].gp[g].sigma[c];
          }
        } else {
          val = snap.states[e].gp[0].sigma;
        }
        const int n = conn[a];
        for (int c = 0; c < 4; ++c) out[n][c] += vol * val[c];
        wsum[n] += vol;
      }
    }
    for (int n = 0; n < nn; ++n)
      if (wsum[n] > 0.0)
        for (int c = 0; c < 4; ++c) out[n][c] /= wsum[n];
    return out;
  }

  // Superconvergent patch recovery: per node, least-squares linear fit of
  // the surrounding integration-point values.
  const auto adj = node_elements(mesh);
  for (int n = 0; n < nn; ++n) {
    std::vector<Vec2> pos;
    std::vector<std::array<double, 4>> val;
    for (int e : adj[n]) {
      const auto& conn = mesh.elems[e];
      const auto xcur = flat_coords(snap.coords, conn);
      for (int g = 0; g < ngp; ++g) {
        const double xi = ngp == 4 ? detail::kGp * detail::kXi[g] : 0.0;
        const double eta = ngp == 4 ? detail::kGp * detail::kEta[g] : 0.0;
        const auto N = shape_at(xi, eta);
        Vec2 p{0, 0};
        for (int a = 0; a < 4; ++a) p += N[a] * Vec2{xcur[2 * a], xcur[2 * a + 1]};
        pos.push_back(p);
        val.push_back(snap.states[e].gp[g].sigma);
      }
    }
    const Vec2 x0 = snap.coords[n];
    double scale = 0.0;
    for (const Vec2& p : pos) scale = std::max(scale, (p - x0).norm());
    if (pos.size() < 3 || scale <= 0.0) {
      std::array<double, 4> mean{};
      for (const auto& v : val)
        for (int c = 0; c < 4; ++c) mean[c] += v[c];
      for (int c = 0; c < 4; ++c) out[n][c] = val.empty() ? 0.0 : mean[c] / val.size();
      continue;
    }
    // Normal equations for p(x) = c0 + c1 u + c2 w, (u,w) centered at the node.
    double A[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double B[3][4] = {{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};
    for (size_t k = 0; k < pos.size(); ++k) {
      const double u = (pos[k].x - x0.x) / scale, w = (pos[k].y - x0.y) / scale;
      const double phi[3] = {1.0, u, w};
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) A[i][j] += phi[i] * phi[j];
        for (int c = 0; c < 4; ++c) B[i][c] += phi[i] * val[k][c];
      }
    }
    const double det = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                       A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                       A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
    if (std::abs(det) < 1e-10 * pos.size()) {
      std::array<double, 4> mean{};
      for (const auto& v : val)
        for (int c = 0; c < 4; ++c) mean[c] += v[c];
      for (int c = 0; c < 4; ++c) out[n][c] = mean[c] / val.size();
      continue;
    }
    // Only c0 (value at the node) is needed: Cramer on the first unknown.
    for (int c = 0; c < 4; ++c) {
      const double det0 = B[0][c] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                          A[0][1] * (B[1][c] * A[2][2] - A[1][2] * B[2][c]) +
                          A[0][2] * (B[1][c] * A[2][1] - A[1][1] * B[2][c]);
      out[n][c] = det0 / det;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Chain {
  std::vector<Vec2> pts;
  std::vector<int> ids;
};

// Intersection of the infinite line P + t*d with chain segments; returns the
// crossing with the smallest |t| together with the interpolated field value.
struct ChainHit {
  bool found = false;
  double t = 0.0;
  Vec2 point;
  double value = 0.0;
};

ChainHit intersect_chain(const Chain& chain, const Vec2& P, const Vec2& d,
                         const std::vector<double>& nodal_value) {
  ChainHit best;
  for (size_t k = 0; k + 1 < chain.pts.size(); ++k) {
    const Vec2 q0 = chain.pts[k], q1 = chain.pts[k + 1];
    const Vec2 e = q1 - q0;
    const double det = d.cross(e) * -1.0;  // solve P + t d = q0 + u e
    if (std::abs(det) < 1e-30) continue;
    const Vec2 rhs = q0 - P;
    const double t = (rhs.x * (-e.y) - rhs.y * (-e.x)) / det;
    const double u = (d.x * rhs.y - d.y * rhs.x) / det;
    if (u < -1e-9 || u > 1.0 + 1e-9) continue;
    if (!best.found || std::abs(t) < std::abs(best.t)) {
      best.found = true;
      best.t = t;
      best.point = P + d * t;
      const double uu = std::clamp(u, 0.0, 1.0);
      best.value = (1.0 - uu) * nodal_value[chain.ids[k]] + uu * nodal_value[chain.ids[k + 1]];
    }
  }
  return best;
}

}  // namespace

std::vector<SectionProfile> build_sections(const FieldSnapshot& snap, const Mesh& mesh,
                                           const ElementFormulation& form,
                                           const SectionParams& params,
                                           RecoveryMethod method) {
  const auto nodal = recover_nodal_stress(snap, mesh, form, method);
  std::vector<double> sxx(mesh.n_nodes());
  for (int n = 0; n < mesh.n_nodes(); ++n) sxx[n] = nodal[n][0];

  Chain bottom, top;
  bottom.ids = mesh.column(0);
  top.ids = mesh.column(mesh.nx);
  for (int id : bottom.ids) bottom.pts.push_back(snap.coords[id]);
  for (int id : top.ids) top.pts.push_back(snap.coords[id]);

  // Medial axis from matched surface nodes, lightly smoothed.
  const int ny = mesh.ny;
  std::vector<Vec2> medial(ny + 1);
  const int half = std::max(0, params.smooth_window / 2);
  for (int j = 0; j <= ny; ++j) {
    Vec2 acc{0, 0};
    int cnt = 0;
    for (int k = std::max(0, j - half); k <= std::min(ny, j + half); ++k) {
      acc += (bottom.pts[k] + top.pts[k]) * 0.5;
      ++cnt;
    }
    medial[j] = acc / cnt;
  }
  std::vector<double> s(ny + 1, 0.0);
  for (int j = 1; j <= ny; ++j) s[j] = s[j - 1] + (medial[j] - medial[j - 1]).norm();
  const double total = s[ny];

  // Element bounding boxes in the deformed configuration.
  std::vector<std::array<double, 4>> bbox(mesh.n_elems());
  for (int e = 0; e < mesh.n_elems(); ++e) {
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (int a = 0; a < 4; ++a) {
      const Vec2 p = snap.coords[mesh.elems[e][a]];
      xlo = std::min(xlo, p.x);
      xhi = std::max(xhi, p.x);
      ylo = std::min(ylo, p.y);
      yhi = std::max(yhi, p.y);
    }
    bbox[e] = {xlo, xhi, ylo, yhi};
  }

  std::vector<SectionProfile> sections;
  int id = 0;
  for (double st = params.trim_head; st <= total - params.trim_tail + 1e-12;
       st += params.spacing) {
    const auto it = std::upper_bound(s.begin(), s.end(), st);
    int j = int(it - s.begin()) - 1;
    j = std::clamp(j, 0, ny - 1);
    const double seg = s[j + 1] - s[j];
    const double lam = seg > 0.0 ? (st - s[j]) / seg : 0.0;
    const Vec2 P = medial[j] + (medial[j + 1] - medial[j]) * lam;
    const Vec2 tangent = (medial[j + 1] - medial[j]).normalized();
    const Vec2 ndir = tangent.perp();

    ChainHit hb = intersect_chain(bottom, P, ndir, sxx);
    ChainHit ht = intersect_chain(top, P, ndir, sxx);
    if (!hb.found || !ht.found) continue;

    SectionProfile sec;
    sec.section_id = id++;
    sec.arclength_s = st;
    const Vec2 A = hb.point, B = ht.point;
    sec.h = (B - A).norm();
    if (sec.h <= 0.0) continue;

    struct Sample {
      double t;
      double v;
    };
    std::vector<Sample> samples{{0.0, hb.value}, {1.0, ht.value}};
    const Vec2 dir = B - A;
    const double bx_lo = std::min(A.x, B.x), bx_hi = std::max(A.x, B.x);
    const double by_lo = std::min(A.y, B.y), by_hi = std::max(A.y, B.y);
    for (int e = 0; e < mesh.n_elems(); ++e) {
      if (bbox[e][0] > bx_hi || bbox[e][1] < bx_lo || bbox[e][2] > by_hi ||
          bbox[e][3] < by_lo)
        continue;
      const auto& conn = mesh.elems[e];
      for (int k = 0; k < 4; ++k) {
        const int n0 = conn[k], n1 = conn[(k + 1) % 4];
        if (n0 > n1) continue;  // visit each edge once
        const Vec2 q0 = snap.coords[n0], q1 = snap.coords[n1];
        const Vec2 ev = q1 - q0;
        const double det = dir.x * (-ev.y) - dir.y * (-ev.x);
        if (std::abs(det) < 1e-30) continue;
        const Vec2 rhs = q0 - A;
        const double t = (rhs.x * (-ev.y) - rhs.y * (-ev.x)) / det;
        const double u = (dir.x * rhs.y - dir.y * rhs.x) / det;
        if (t <= 1e-9 || t >= 1.0 - 1e-9 || u < -1e-9 || u > 1.0 + 1e-9) continue;
        const double uu = std::clamp(u, 0.0, 1.0);
        samples.push_back({t, (1.0 - uu) * sxx[n0] + uu * sxx[n1]});
      }
    }
    std::sort(samples.begin(), samples.end(),
              [](const Sample& a, const Sample& b) { return a.t < b.t; });
    samples.erase(std::unique(samples.begin(), samples.end(),
                              [](const Sample& a, const Sample& b) {
                                return std::abs(a.t - b.t) < 1e-9;
                              }),
                  samples.end());

    double best = -1e300;
    double hb_off = 0.0;
    for (const Sample& sm : samples) {
      sec.nd_coordinate.push_back(sm.t * sec.h);
      sec.sigma_xx_nd.push_back(sm.v);
      if (sm.v > best) {
        best = sm.v;
        hb_off = sm.t * sec.h;  // strict > keeps the bottom-most maximizer
      }
    }
    sec.max_sigma_xx = best;
    sec.h_b = hb_off;
    sections.push_back(std::move(sec));
  }
  if (sections.empty())
    throw PostprocError("sections: no valid sections inside the trimmed window");
  return sections;
}

// ---------------------------------------------------------------------------

const char* classification_name(Classification c) {
  switch (c) {
    case Classification::Periodic: return "Periodic";
    case Classification::Aperiodic: return "Aperiodic";
    case Classification::Steady: return "Steady";
  }
  return "?";
}

Spectrum hann_spectrum(const std::vector<double>& signal, double ds) {
  const int N = int(signal.size());
  Spectrum sp;
  if (N < 2) return sp;
  const double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / N;
  std::vector<double> w(N), d(N);
  sp.window_sum = 0.0;
  for (int i = 0; i < N; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / (N - 1)));
    d[i] = (signal[i] - mean) * w[i];
    sp.window_sum += w[i];
  }
  const int nk = N / 2;
  sp.coef.resize(nk + 1);
  for (int k = 0; k <= nk; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (int i = 0; i < N; ++i) {
      const double ang = -2.0 * kPi * double(k) * double(i) / N;
      acc += d[i] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    sp.coef[k] = acc;
    if (k >= 1) {
      sp.freq.push_back(double(k) / (N * ds));
      sp.amplitude.push_back(2.0 * std::abs(acc) / sp.window_sum);
    }
  }
  return sp;
}

OscillationReport longitudinal_curve(const std::vector<SectionProfile>& sections,
                                     const OscillationParams& params) {
  if (sections.size() < 32)
    throw PostprocError("oscillation: need at least 32 sections, got " +
                        std::to_string(sections.size()));
  OscillationReport rep;
  for (const SectionProfile& s : sections) {
    rep.s_grid.push_back(s.arclength_s);
    rep.signal.push_back(s.max_sigma_xx);
  }
  const int N = int(rep.signal.size());
  const double ds = (rep.s_grid.back() - rep.s_grid.front()) / (N - 1);

  const Spectrum sp = hann_spectrum(rep.signal, ds);
  rep.freq = sp.freq;
  rep.amplitude = sp.amplitude;

  // Dominant peak against the median spectral amplitude.
  std::vector<double> sorted = sp.amplitude;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];
  int kmax = -1;
  double amax = 0.0;
  for (size_t k = 0; k < sp.amplitude.size(); ++k)
    if (sp.amplitude[k] > amax) {
      amax = sp.amplitude[k];
      kmax = int(k) + 1;  // bin index
    }
  const bool has_dominant = kmax >= 1 && amax > 0.0 && amax >= params.peak_median_ratio * median;

  double e_tot = 0.0, e_peak = 0.0;
  for (size_t k = 1; k < sp.coef.size(); ++k) {
    const double e = std::norm(sp.coef[k]);
    e_tot += e;
    if (has_dominant && std::abs(int(k) - kmax) <= 2) e_peak += e;
  }
  rep.dominant_energy_share = e_tot > 0.0 ? e_peak / e_tot : 0.0;
  if (has_dominant) rep.dominant_frequency = double(kmax) / (N * ds);

  const auto minmax = std::minmax_element(rep.signal.begin(), rep.signal.end());
  const double d_window = *minmax.second - *minmax.first;

  if (d_window < params.d_threshold) {
    rep.classification = Classification::Steady;
    rep.D = d_window;
    return rep;
  }
  if (has_dominant && rep.dominant_energy_share >= params.energy_share_min) {
    rep.classification = Classification::Periodic;
    // One cycle between upward zero crossings of the dominant component,
    // taken near the window center.
    const double phase = std::arg(sp.coef[kmax]);
    const double lambda = double(N) / kmax;
    std::vector<double> crossings;
    double prev = std::cos(phase);
    for (int i = 1; i < N; ++i) {
      const double cur = std::cos(2.0 * kPi * kmax * i / N + phase);
      if (prev <= 0.0 && cur > 0.0) {
        const double frac = prev == cur ? 0.0 : -prev / (cur - prev);
        crossings.push_back(i - 1 + frac);
      }
      prev = cur;
    }
    double z = 0.0;
    if (!crossings.empty()) {
      const double want = 0.5 * (N - lambda);
      z = crossings.front();
      for (double c : crossings)
        if (std::abs(c - want) < std::abs(z - want)) z = c;
    }
    int i0 = std::clamp(int(std::ceil(z)), 0, N - 1);
    int i1 = std::clamp(int(std::floor(z + lambda)), i0, N - 1);
    if (i1 - i0 < 2) {
      i0 = 0;
      i1 = N - 1;
    }
    double lo = 1e300, hi = -1e300;
    for (int i = i0; i <= i1; ++i) {
      lo = std::min(lo, rep.signal[i]);
      hi = std::max(hi, rep.signal[i]);
    }
    rep.D = hi - lo;
    return rep;
  }
  rep.classification = Classification::Aperiodic;
  rep.D = d_window;
  return rep;
}

// ---------------------------------------------------------------------------

MaterialLineSample sample_material_line(const FieldSnapshot& snap, const Mesh& mesh,
                                        const ElementFormulation& form, const Vec2& a,
                                        const Vec2& b, RecoveryMethod method) {
  MaterialLineSample out;
  out.a = a;
  out.b = b;
  out.element_size = mesh.element_size();
  const auto ids = material_line(mesh, a, b);
  const auto nodal = recover_nodal_stress(snap, mesh, form, method);
  const Vec2 ab = b - a;
  const double len2 = ab.squared_norm();
  for (int id : ids) {
    out.t.push_back(std::clamp((mesh.nodes[id] - a).dot(ab) / len2, 0.0, 1.0));
    out.sxx.push_back(nodal[id][0]);
  }
  return out;
}

ConvergenceReport compare_material_line(std::vector<MaterialLineSample> runs,
                                        double threshold) {
  if (runs.size() < 2)
    throw PostprocError("convergence: need at least two runs to compare");
  for (const auto& r : runs) {
    if (r.t.size() < 2) throw PostprocError("convergence: empty material line sample");
    if ((r.a - runs[0].a).norm() > 1e-12 || (r.b - runs[0].b).norm() > 1e-12)
      throw PostprocError("convergence: runs sample different material lines");
  }
  std::sort(runs.begin(), runs.end(), [](const auto& x, const auto& y) {
    return x.element_size > y.element_size;
  });

  const int M = 201;
  auto resample = [&](const MaterialLineSample& r) {
    std::vector<double> v(M);
    for (int i = 0; i < M; ++i) {
      const double t = double(i) / (M - 1);
      const auto it = std::lower_bound(r.t.begin(), r.t.end(), t);
      size_t j = it - r.t.begin();
      if (j == 0) j = 1;
      if (j >= r.t.size()) j = r.t.size() - 1;
      const double t0 = r.t[j - 1], t1 = r.t[j];
      const double lam = t1 > t0 ? std::clamp((t - t0) / (t1 - t0), 0.0, 1.0) : 0.0;
      v[i] = (1.0 - lam) * r.sxx[j - 1] + lam * r.sxx[j];
    }
    return v;
  };

  ConvergenceReport rep;
  rep.threshold = threshold;
  std::vector<std::vector<double>> grids;
  for (const auto& r : runs) grids.push_back(resample(r));
  for (size_t k = 0; k + 1 < runs.size(); ++k) {
    ConvergencePair pair;
    pair.size_coarse = runs[k].element_size;
    pair.size_fine = runs[k + 1].element_size;
    double diff2 = 0.0, ref2 = 0.0, dmax = 0.0, rmax = 0.0;
    for (int i = 0; i < M; ++i) {
      const double d = grids[k][i] - grids[k + 1][i];
      diff2 += d * d;
      ref2 += grids[k + 1][i] * grids[k + 1][i];
      dmax = std::max(dmax, std::abs(d));
      rmax = std::max(rmax, std::abs(grids[k + 1][i]));
    }
    pair.l2_rel = ref2 > 0.0 ? std::sqrt(diff2 / ref2) : 0.0;
    pair.max_rel = rmax > 0.0 ? dmax / rmax : 0.0;
    rep.pairs.push_back(pair);
  }
  rep.converged = rep.pairs.back().l2_rel < threshold;
  rep.selected_size = rep.converged ? rep.pairs.back().size_coarse : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------

std::optional<double> autocorrelation_period(const std::vector<double>& t,
                                             const std::vector<double>& v,
                                             double min_corr) {
  const int n = int(t.size());
  if (n < 8) return std::nullopt;
  const int M = 256;
  const double t0 = t.front(), t1 = t.back();
  if (!(t1 > t0)) return std::nullopt;
  const double dtg = (t1 - t0) / (M - 1);

  // Resample onto a uniform grid, interpolating across undefined gaps.
  std::vector<double> g(M);
  int defined = 0;
  for (int i = 0; i < M; ++i) {
    const double ti = t0 + i * dtg;
    const auto it = std::lower_bound(t.begin(), t.end(), ti);
    size_t j = std::min<size_t>(std::max<size_t>(it - t.begin(), 1), n - 1);
    double a = v[j - 1], b = v[j];
    // Walk outward past NaNs.
    size_t ja = j - 1, jb = j;
    while (ja > 0 && !std::isfinite(a)) a = v[--ja];
    while (jb + 1 < size_t(n) && !std::isfinite(b)) b = v[++jb];
    if (!std::isfinite(a)) a = b;
    if (!std::isfinite(b)) b = a;
    if (!std::isfinite(a)) {
      g[i] = 0.0;
      continue;
    }
    const double ta = t[ja], tb = t[jb];
    const double lam = tb > ta ? std::clamp((ti - ta) / (tb - ta), 0.0, 1.0) : 0.0;
    g[i] = (1.0 - lam) * a + lam * b;
    ++defined;
  }
  if (defined < M / 2) return std::nullopt;
  const double mean = std::accumulate(g.begin(), g.end(), 0.0) / M;
  for (double& x : g) x -= mean;
  double var = 0.0;
  for (double x : g) var += x * x;
  if (var <= 0.0) return std::nullopt;

  std::vector<double> r(M / 2, 0.0);
  for (int l = 0; l < M / 2; ++l) {
    double acc = 0.0;
    for (int i = 0; i + l < M; ++i) acc += g[i] * g[i + l];
    r[l] = acc / var;
  }
  const int lmin = std::max(2, M / 64);
  for (int l = lmin; l + 1 < int(r.size()); ++l)
    if (r[l] >= min_corr && r[l] >= r[l - 1] && r[l] >= r[l + 1]) return l * dtg;
  return std::nullopt;
}

ContactTrace trace_contact(const SnapshotSource& snaps, const Mesh& mesh,
                           const ElementFormulation& form, const TraceParams& params,
                           Surface surface, RecoveryMethod method) {
  if (!(params.window_hi > params.window_lo))
    throw PostprocError("trace: empty observation window");
  ContactTrace tr;
  tr.surface = surface;
  const auto chain = surface == Surface::Top ? mesh.column(mesh.nx) : mesh.column(0);

  for (int i = 0; i < snaps.count(); ++i) {
    const FieldSnapshot snap = snaps.load(i);
    if (snap.time < params.t_lo || snap.time > params.t_hi) continue;
    if (snap.phase != Phase::PunchPush && snap.phase != Phase::ArcPush) continue;
    std::vector<std::pair<double, double>> pts;
    std::vector<std::array<double, 4>> nodal;
    for (int id : chain) {
      const double x = snap.coords[id].x;
      if (x < params.window_lo || x > params.window_hi) continue;
      if (nodal.empty()) nodal = recover_nodal_stress(snap, mesh, form, method);
      pts.emplace_back(x, nodal[id][1]);
    }
    if (pts.empty()) continue;
    std::sort(pts.begin(), pts.end());
    tr.times.push_back(snap.time);
    std::vector<double> xs, ss;
    double wsum = 0.0, xw = 0.0;
    for (const auto& [x, syy] : pts) {
      xs.push_back(x);
      ss.push_back(syy);
      const double w = std::max(0.0, -syy);
      wsum += w;
      xw += w * x;
    }
    tr.x.push_back(std::move(xs));
    tr.syy.push_back(std::move(ss));
    tr.locus.push_back(wsum > 0.0 ? xw / wsum : std::numeric_limits<double>::quiet_NaN());
  }
  if (tr.times.empty())
    throw PostprocError("trace: no snapshots with surface nodes inside the window");

  double lo = 1e300, hi = -1e300;
  for (double c : tr.locus)
    if (std::isfinite(c)) {
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  tr.locus_range = hi >= lo ? hi - lo : 0.0;
  tr.recurrence_period = autocorrelation_period(tr.times, tr.locus);
  return tr;
}

}  // namespace ecae
