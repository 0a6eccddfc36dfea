#include <iostream>

#include "CLI11.hpp"
#include "ecae/cli.hpp"

namespace {

ecae::RunConfig resolve_config(const std::string& config_path, const std::string& preset) {
  if (!config_path.empty()) return ecae::load_config_file(config_path);
  if (!preset.empty()) return ecae::preset_config(preset);
  throw ecae::ConfigError("need --config or --preset");
}

void print_summary(const ecae::AnalysisSummary& s) {
  std::cout << "classification: " << ecae::classification_name(s.classification) << "\n"
            << "D:              " << s.D << " Pa\n"
            << "h (median):     " << s.h_median << " m\n"
            << "h_b/h (median): " << s.hb_over_h_median << "\n"
            << "sections:       " << s.n_sections << "\n";
  if (s.dominant_frequency)
    std::cout << "dominant freq:  " << *s.dominant_frequency << " 1/m\n";
  if (s.top_recurrence_period)
    std::cout << "top contact recurrence: " << *s.top_recurrence_period << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D plane-strain angular channel extrusion simulator"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir, run_dir, sizes_str;
  int parallel = 1;

  auto add_cfg = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration JSON");
    cmd->add_option("--preset", preset, "built-in preset: smoke, fine, paper");
  };

  CLI::App* run = app.add_subcommand("run", "execute a single extrusion and its analysis");
  add_cfg(run);
  run->add_option("--out", out_dir, "output run directory")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep (Tables 2-3 style)");
  sweep->add_option("--config", config_path, "sweep specification JSON")->required();
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--parallel", parallel, "concurrent cases")->default_val(1);

  CLI::App* conv = app.add_subcommand("converge", "h-refinement study along the A-B line");
  add_cfg(conv);
  conv->add_option("--sizes", sizes_str, "comma-separated element sizes in meters")
      ->required();
  conv->add_option("--out", out_dir, "output directory")->required();

  CLI::App* ana = app.add_subcommand("analyze", "re-run post-processing on a run directory");
  ana->add_option("--run", run_dir, "existing run directory")->required();

  CLI::App* geom = app.add_subcommand("geometry", "geometry utilities");
  CLI::App* gdump = geom->add_subcommand("dump", "write the die boundary as CSV");
  add_cfg(gdump);
  gdump->add_option("--out", out_dir, "output CSV path")->required();

  CLI::App* meshc = app.add_subcommand("mesh", "mesh utilities");
  CLI::App* mdump = meshc->add_subcommand("dump", "write billet nodes/elements as CSV");
  add_cfg(mdump);
  mdump->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      print_summary(ecae::cmd_run(resolve_config(config_path, preset), out_dir));
    } else if (sweep->parsed()) {
      const ecae::SweepResult r =
          ecae::cmd_sweep(ecae::load_sweep_file(config_path), out_dir, parallel);
      for (const auto& c : r.cases)
        std::cout << c.name << ": "
                  << (c.ok ? ecae::classification_name(c.summary.classification)
                           : ("FAILED: " + c.error))
                  << "\n";
      if (r.n_failed > 0) {
        std::cerr << r.n_failed << " case(s) failed\n";
        return 1;
      }
    } else if (conv->parsed()) {
      std::vector<double> sizes;
      std::stringstream ss(sizes_str);
      std::string tok;
      while (std::getline(ss, tok, ',')) sizes.push_back(std::stod(tok));
      const ecae::ConvergeResult r =
          ecae::cmd_converge(resolve_config(config_path, preset), sizes, out_dir);
      if (r.sizes_reordered)
        std::cout << "note: sizes were reordered to descending\n";
      for (const auto& p : r.report.pairs)
        std::cout << p.size_coarse << " -> " << p.size_fine << ": L2 " << p.l2_rel
                  << ", max " << p.max_rel << "\n";
      std::cout << (r.report.converged ? "converged" : "not converged")
                << (r.report.converged
                        ? ", selected size " + std::to_string(r.report.selected_size)
                        : "")
                << "\n";
    } else if (ana->parsed()) {
      print_summary(ecae::cmd_analyze(run_dir));
    } else if (gdump->parsed()) {
      ecae::cmd_geometry_dump(resolve_config(config_path, preset), out_dir);
    } else if (mdump->parsed()) {
      ecae::ensure_dir(out_dir);
      ecae::cmd_mesh_dump(resolve_config(config_path, preset), out_dir + "/nodes.csv",
                          out_dir + "/elements.csv");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
