#include "ecae/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "json.hpp"

namespace ecae {

using nlohmann::json;

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json summary_to_json(const AnalysisSummary& s) {
  json j;
  j["classification"] = classification_name(s.classification);
  j["D"] = s.D;
  j["dominant_frequency"] =
      s.dominant_frequency ? json(*s.dominant_frequency) : json(nullptr);
  j["dominant_energy_share"] = s.dominant_energy_share;
  j["h_median"] = s.h_median;
  j["hb_over_h_median"] = s.hb_over_h_median;
  j["n_sections"] = s.n_sections;
  j["window_lo"] = s.window_lo;
  j["window_hi"] = s.window_hi;
  j["top_locus_range_rel"] = s.top_locus_range_rel;
  j["bottom_locus_range_rel"] = s.bottom_locus_range_rel;
  j["top_recurrence_period"] =
      s.top_recurrence_period ? json(*s.top_recurrence_period) : json(nullptr);
  j["bottom_recurrence_period"] =
      s.bottom_recurrence_period ? json(*s.bottom_recurrence_period) : json(nullptr);
  return j;
}

}  // namespace

AnalysisSummary analyze_run(const RunConfig& cfg, const SnapshotSource& snaps,
                            const std::string& out_dir) {
  const std::string adir = out_dir + "/analysis";
  ensure_dir(adir);
  const Mesh mesh = generate_mesh(cfg.billet_spec());
  const ElementFormulation form = cfg.formulation();
  const RecoveryMethod recovery = cfg.recovery_method();
  if (snaps.count() == 0) throw PostprocError("analyze: run has no snapshots");
  const FieldSnapshot final_snap = snaps.load(snaps.count() - 1);

  AnalysisSummary out;
  const auto sections = build_sections(final_snap, mesh, form, cfg.section_params(), recovery);
  write_sections_csv(sections, adir + "/sections.csv");
  out.n_sections = int(sections.size());
  {
    std::vector<double> hs, ratios;
    for (const auto& s : sections) {
      hs.push_back(s.h);
      if (s.h > 0.0) ratios.push_back(s.h_b / s.h);
    }
    out.h_median = median(hs);
    out.hb_over_h_median = median(ratios);
  }

  const OscillationReport rep = longitudinal_curve(sections, cfg.oscillation_params());
  write_curve_csv(rep, adir + "/cd_curve.csv");
  write_spectrum_csv(rep, adir + "/spectrum.csv");
  out.classification = rep.classification;
  out.D = rep.D;
  out.dominant_frequency = rep.dominant_frequency;
  out.dominant_energy_share = rep.dominant_energy_share;

  write_svg_plot({{"max sectional sxx", rep.s_grid, rep.signal}},
                 "Longitudinal residual stress", "s along medial axis [m]", "sigma_xx [Pa]",
                 adir + "/cd_curve.svg");
  write_svg_plot({{"amplitude", rep.freq, rep.amplitude}}, "Spectrum of the C-D curve",
                 "spatial frequency [1/m]", "amplitude [Pa]", adir + "/spectrum.svg");
  {
    std::vector<PlotSeries> nd;
    const int picks[3] = {int(sections.size()) / 4, int(sections.size()) / 2,
                          3 * int(sections.size()) / 4};
    for (int p : picks) {
      const auto& s = sections[std::clamp(p, 0, int(sections.size()) - 1)];
      char label[48];
      std::snprintf(label, sizeof(label), "s = %.4g m", s.arclength_s);
      nd.push_back({label, s.nd_coordinate, s.sigma_xx_nd});
    }
    write_svg_plot(nd, "Through-thickness residual stress", "ND position [m]",
                   "sigma_xx [Pa]", adir + "/nd_profiles.svg");
  }

  const TraceParams tp = cfg.trace_params();
  out.window_lo = tp.window_lo;
  out.window_hi = tp.window_hi;
  const double wlen = tp.window_hi - tp.window_lo;
  try {
    const ContactTrace top = trace_contact(snaps, mesh, form, tp, Surface::Top, recovery);
    write_trace_csv(top, adir + "/contact_top.csv");
    out.top_locus_range_rel = wlen > 0.0 ? top.locus_range / wlen : 0.0;
    out.top_recurrence_period = top.recurrence_period;
    const ContactTrace bot = trace_contact(snaps, mesh, form, tp, Surface::Bottom, recovery);
    write_trace_csv(bot, adir + "/contact_bottom.csv");
    out.bottom_locus_range_rel = wlen > 0.0 ? bot.locus_range / wlen : 0.0;
    out.bottom_recurrence_period = bot.recurrence_period;
    write_svg_plot({{"top", top.times, top.locus}, {"bottom", bot.times, bot.locus}},
                   "Contact locus in the exit channel", "time [s]", "x [m]",
                   adir + "/contact_locus.svg");
    std::vector<PlotSeries> inst;
    const int n = int(top.times.size());
    for (int k = 0; k < std::min(6, n); ++k) {
      const int i = n <= 6 ? k : k * (n - 1) / 5;
      char label[40];
      std::snprintf(label, sizeof(label), "t = %.3g s", top.times[i]);
      inst.push_back({label, top.x[i], top.syy[i]});
    }
    write_svg_plot(inst, "sigma_yy on the top surface", "x [m]", "sigma_yy [Pa]",
                   adir + "/contact_top.svg");
  } catch (const PostprocError&) {
    // Short runs may never populate the observation window; sections and
    // spectra above are still valid.
  }

  std::ofstream f(out_dir + "/analysis/summary.json");
  f << summary_to_json(out).dump(2) << "\n";
  return out;
}

AnalysisSummary cmd_run(const RunConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  const Mesh mesh = generate_mesh(cfg.billet_spec());
  const DieBoundary die(cfg.die);
  RunWriter writer(out_dir, cfg);

  RunInputs in;
  in.mesh = &mesh;
  in.die = &die;
  in.material = cfg.material;
  in.formulation = cfg.formulation();
  in.schedule = cfg.load_schedule();
  in.solve = cfg.solve;
  in.contact = cfg.contact_params();
  in.billet_origin = cfg.billet_origin();

  RunStats stats;
  try {
    run_extrusion(in, &writer, &stats);
  } catch (const std::exception& e) {
    writer.finalize(stats);
    std::ofstream err(out_dir + "/error.txt");
    err << e.what() << "\n";
    throw;
  }
  writer.finalize(stats);

  RunReader reader(out_dir);
  return analyze_run(cfg, reader, out_dir);
}

AnalysisSummary cmd_analyze(const std::string& run_dir) {
  RunReader reader(run_dir);
  return analyze_run(reader.config(), reader, run_dir);
}

SweepResult cmd_sweep(const SweepSpec& spec, const std::string& out_dir, int parallel) {
  spec.validate();
  ensure_dir(out_dir);
  const int n = int(spec.values.size());
  SweepResult result;
  result.cases.resize(n);
  parallel = std::max(1, parallel);

  // Keep total thread usage near the machine width when cases run
  // concurrently; per-case results do not depend on the thread count.
  const int base_threads = omp_get_max_threads();
  const int per_case_threads = std::max(1, base_threads / parallel);

  std::atomic<int> next(0);
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      SweepCaseResult& cr = result.cases[i];
      cr.name = spec.case_name(i);
      cr.value = spec.values[i];
      RunConfig cfg = spec.case_config(spec.values[i]);
      if (cfg.solve.n_threads == 0) cfg.solve.n_threads = per_case_threads;
      try {
        cr.summary = cmd_run(cfg, out_dir + "/" + cr.name);
        cr.ok = true;
      } catch (const std::exception& e) {
        cr.ok = false;
        cr.error = e.what();
      }
    }
  };
  if (parallel == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < parallel; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Aggregate in case order so the summary is independent of scheduling.
  json jcases = json::array();
  std::ofstream csv(out_dir + "/summary.csv");
  csv << "case,value,status,classification,D,h_median,hb_over_h_median,dominant_frequency,"
         "top_recurrence_period\n";
  for (const SweepCaseResult& cr : result.cases) {
    if (!cr.ok) ++result.n_failed;
    json jc;
    jc["case"] = cr.name;
    jc["value"] = cr.value;
    jc["status"] = cr.ok ? "ok" : "failed";
    if (cr.ok)
      jc["summary"] = summary_to_json(cr.summary);
    else
      jc["error"] = cr.error;
    jcases.push_back(jc);
    char line[512];
    if (cr.ok) {
      std::snprintf(line, sizeof(line), "%s,%.17g,ok,%s,%.17g,%.17g,%.17g,%.17g,%.17g",
                    cr.name.c_str(), cr.value,
                    classification_name(cr.summary.classification), cr.summary.D,
                    cr.summary.h_median, cr.summary.hb_over_h_median,
                    cr.summary.dominant_frequency.value_or(0.0),
                    cr.summary.top_recurrence_period.value_or(0.0));
    } else {
      std::snprintf(line, sizeof(line), "%s,%.17g,failed,,,,,,", cr.name.c_str(), cr.value);
    }
    csv << line << "\n";
  }
  json j;
  j["axis"] = spec.axis == SweepSpec::Axis::ER ? "ER" : "HardeningRate";
  j["cases"] = jcases;
  std::ofstream js(out_dir + "/summary.json");
  js << j.dump(2) << "\n";

  // D trend plot over the sweep axis.
  PlotSeries d_series{"D", {}, {}};
  for (const SweepCaseResult& cr : result.cases)
    if (cr.ok) {
      d_series.x.push_back(cr.value);
      d_series.y.push_back(cr.summary.D);
    }
  if (d_series.x.size() >= 2)
    write_svg_plot({d_series}, "Oscillation amplitude over the sweep",
                   spec.axis == SweepSpec::Axis::ER ? "ER" : "hardening rate [Pa]", "D [Pa]",
                   out_dir + "/d_trend.svg");
  return result;
}

ConvergeResult cmd_converge(const RunConfig& base, std::vector<double> sizes,
                            const std::string& out_dir) {
  if (sizes.size() < 2) throw ConfigError("converge: need at least two element sizes");
  ConvergeResult out;
  std::vector<double> sorted = sizes;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  out.sizes_reordered = sorted != sizes;
  out.sizes = sorted;
  ensure_dir(out_dir);

  std::vector<MaterialLineSample> samples;
  for (size_t k = 0; k < sorted.size(); ++k) {
    RunConfig cfg = base;
    cfg.billet.target_element_size = sorted[k];
    cfg.validate();
    char sub[64];
    std::snprintf(sub, sizeof(sub), "size_%02zu_%gmm", k, sorted[k] * 1e3);
    const std::string dir = out_dir + "/" + sub;
    cmd_run(cfg, dir);
    RunReader reader(dir);
    const Mesh mesh = generate_mesh(cfg.billet_spec());
    samples.push_back(sample_material_line(reader.load(reader.count() - 1), mesh,
                                           cfg.formulation(), cfg.material_line_a(),
                                           cfg.material_line_b(), cfg.recovery_method()));
  }
  out.report = compare_material_line(samples, 0.05);
  write_convergence_csv(out.report, out_dir + "/convergence.csv");

  json j;
  j["sizes"] = out.sizes;
  j["sizes_reordered"] = out.sizes_reordered;
  j["converged"] = out.report.converged;
  j["selected_size"] = out.report.selected_size;
  json pairs = json::array();
  for (const auto& p : out.report.pairs)
    pairs.push_back({{"size_coarse", p.size_coarse},
                     {"size_fine", p.size_fine},
                     {"l2_rel", p.l2_rel},
                     {"max_rel", p.max_rel}});
  j["pairs"] = pairs;
  std::ofstream f(out_dir + "/convergence.json");
  f << j.dump(2) << "\n";
  return out;
}

void cmd_geometry_dump(const RunConfig& cfg, const std::string& out_csv) {
  write_boundary_csv(build_die(cfg.die), out_csv);
}

void cmd_mesh_dump(const RunConfig& cfg, const std::string& nodes_csv,
                   const std::string& elems_csv) {
  write_mesh_csv(generate_mesh(cfg.billet_spec()), nodes_csv, elems_csv);
}

}  // namespace ecae
