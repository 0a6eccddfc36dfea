#include "ecae/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ecae {

using nlohmann::json;

namespace {

void check_keys(const json& j, const char* section, std::initializer_list<const char*> keys) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError(std::string("config: unknown key '") + it.key() + "' in section '" +
                        section + "'");
  }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void RunConfig::validate() const {
  try {
    die.validate();
    material.validate();
    solve.validate();
    billet_spec().validate();
    formulation().validate();
    load_schedule().validate();
    contact_params().validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (fem.integration != "bbar" && fem.integration != "hourglass")
    throw ConfigError("config: fem.integration must be 'bbar' or 'hourglass'");
  if (fem.recovery != "volume_weighted" && fem.recovery != "spr")
    throw ConfigError("config: fem.recovery must be 'volume_weighted' or 'spr'");
  if (!(analysis.section_spacing > 0.0))
    throw ConfigError("config: analysis.section_spacing must be positive");
  if (analysis.trim_rel < 0.0) throw ConfigError("config: analysis.trim_rel must be >= 0");
  if (billet.length < 2.5 * die.outer_radius() + 2.0 * billet.target_element_size)
    throw ConfigError("config: billet too short to traverse the bend");
}

BilletSpec RunConfig::billet_spec() const {
  BilletSpec s;
  s.width = billet_width();
  s.length = billet.length;
  s.target_element_size = billet.target_element_size;
  s.clearance = billet.clearance;
  return s;
}

Vec2 RunConfig::billet_origin() const {
  const double y0 =
      billet.start_y >= 0.0 ? billet.start_y : die.outer_radius() + billet.clearance;
  return {billet.clearance, y0};
}

ElementFormulation RunConfig::formulation() const {
  ElementFormulation f;
  f.integration = fem.integration == "hourglass" ? Integration::SinglePointHourglass
                                                 : Integration::SelectiveReducedBbar;
  f.hourglass_coefficient = fem.hourglass_coefficient;
  return f;
}

RecoveryMethod RunConfig::recovery_method() const {
  return fem.recovery == "spr" ? RecoveryMethod::SuperconvergentPatch
                               : RecoveryMethod::VolumeWeightedAverage;
}

ContactParams RunConfig::contact_params() const {
  ContactParams c;
  c.penalty_stiffness = contact.penalty_rel * material.E / billet.target_element_size;
  c.activation_tolerance = contact.activation_tolerance_rel * billet.target_element_size;
  return c;
}

LoadSchedule RunConfig::load_schedule() const {
  LoadSchedule s;
  s.punch_speed = schedule.punch_speed;
  s.pullout_peak_traction = schedule.pullout_peak_traction_rel * material.sigma_y0;
  s.pullout_ramp = schedule.pullout_ramp;
  s.pullout_max_travel = schedule.pullout_max_travel;
  s.snapshot_every_dense = schedule.snapshot_every_dense;
  s.snapshot_every_sparse = schedule.snapshot_every_sparse;
  return s;
}

SectionParams RunConfig::section_params() const {
  SectionParams p;
  p.spacing = analysis.section_spacing;
  p.trim_head = analysis.trim_rel * die.W1;
  p.trim_tail = analysis.trim_rel * die.W1;
  return p;
}

OscillationParams RunConfig::oscillation_params() const {
  OscillationParams p;
  p.d_threshold = analysis.d_threshold_rel * material.sigma_y0;
  return p;
}

TraceParams RunConfig::trace_params() const {
  TraceParams p;
  if (analysis.window_lo == 0.0 && analysis.window_hi == 0.0) {
    p.window_lo = std::max(die.outer_radius(), die.W1 + die.inner_radius());
    p.window_hi = die.L2();
  } else {
    p.window_lo = analysis.window_lo;
    p.window_hi = analysis.window_hi;
  }
  return p;
}

Vec2 RunConfig::material_line_a() const {
  return {analysis.ab_a_rel[0] * billet_width(), analysis.ab_a_rel[1] * billet.length};
}

Vec2 RunConfig::material_line_b() const {
  return {analysis.ab_b_rel[0] * billet_width(), analysis.ab_b_rel[1] * billet.length};
}

// ---------------------------------------------------------------------------

namespace {

RunConfig config_from_json(const json& j) {
  RunConfig c;
  check_keys(j, "root",
             {"die", "billet", "material", "schedule", "solve", "fem", "contact", "analysis"});
  if (j.contains("die")) {
    const json& d = j.at("die");
    check_keys(d, "die",
               {"W1", "ER", "L1n", "L2n", "R1n", "R2n", "psi_deg", "phi_deg", "swap_fillets"});
    get_if(d, "W1", c.die.W1);
    get_if(d, "ER", c.die.ER);
    get_if(d, "L1n", c.die.L1n);
    get_if(d, "L2n", c.die.L2n);
    get_if(d, "R1n", c.die.R1n);
    get_if(d, "R2n", c.die.R2n);
    get_if(d, "psi_deg", c.die.psi_deg);
    get_if(d, "phi_deg", c.die.phi_deg);
    get_if(d, "swap_fillets", c.die.swap_fillets);
  }
  if (j.contains("billet")) {
    const json& b = j.at("billet");
    check_keys(b, "billet", {"length", "target_element_size", "clearance", "start_y"});
    get_if(b, "length", c.billet.length);
    get_if(b, "target_element_size", c.billet.target_element_size);
    get_if(b, "clearance", c.billet.clearance);
    get_if(b, "start_y", c.billet.start_y);
  }
  if (j.contains("material")) {
    const json& m = j.at("material");
    check_keys(m, "material", {"E", "nu", "sigma_y0", "H"});
    get_if(m, "E", c.material.E);
    get_if(m, "nu", c.material.nu);
    get_if(m, "sigma_y0", c.material.sigma_y0);
    get_if(m, "H", c.material.H);
  }
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    check_keys(s, "schedule",
               {"punch_speed", "pullout_peak_traction_rel", "pullout_ramp",
                "pullout_max_travel", "snapshot_every_dense", "snapshot_every_sparse"});
    get_if(s, "punch_speed", c.schedule.punch_speed);
    get_if(s, "pullout_peak_traction_rel", c.schedule.pullout_peak_traction_rel);
    get_if(s, "pullout_ramp", c.schedule.pullout_ramp);
    get_if(s, "pullout_max_travel", c.schedule.pullout_max_travel);
    get_if(s, "snapshot_every_dense", c.schedule.snapshot_every_dense);
    get_if(s, "snapshot_every_sparse", c.schedule.snapshot_every_sparse);
  }
  if (j.contains("solve")) {
    const json& s = j.at("solve");
    check_keys(s, "solve",
               {"newton_tol_force", "newton_tol_disp", "max_newton_iters", "max_step_cuts",
                "line_search", "feed_per_increment_rel", "regularization_rel", "n_threads"});
    get_if(s, "newton_tol_force", c.solve.newton_tol_force);
    get_if(s, "newton_tol_disp", c.solve.newton_tol_disp);
    get_if(s, "max_newton_iters", c.solve.max_newton_iters);
    get_if(s, "max_step_cuts", c.solve.max_step_cuts);
    get_if(s, "line_search", c.solve.line_search);
    get_if(s, "feed_per_increment_rel", c.solve.feed_per_increment_rel);
    get_if(s, "regularization_rel", c.solve.regularization_rel);
    get_if(s, "n_threads", c.solve.n_threads);
  }
  if (j.contains("fem")) {
    const json& f = j.at("fem");
    check_keys(f, "fem", {"integration", "hourglass_coefficient", "recovery"});
    get_if(f, "integration", c.fem.integration);
    get_if(f, "hourglass_coefficient", c.fem.hourglass_coefficient);
    get_if(f, "recovery", c.fem.recovery);
  }
  if (j.contains("contact")) {
    const json& k = j.at("contact");
    check_keys(k, "contact", {"penalty_rel", "activation_tolerance_rel"});
    get_if(k, "penalty_rel", c.contact.penalty_rel);
    get_if(k, "activation_tolerance_rel", c.contact.activation_tolerance_rel);
  }
  if (j.contains("analysis")) {
    const json& a = j.at("analysis");
    check_keys(a, "analysis",
               {"section_spacing", "trim_rel", "d_threshold_rel", "window_lo", "window_hi",
                "ab_a_rel", "ab_b_rel"});
    get_if(a, "section_spacing", c.analysis.section_spacing);
    get_if(a, "trim_rel", c.analysis.trim_rel);
    get_if(a, "d_threshold_rel", c.analysis.d_threshold_rel);
    get_if(a, "window_lo", c.analysis.window_lo);
    get_if(a, "window_hi", c.analysis.window_hi);
    if (a.contains("ab_a_rel")) {
      c.analysis.ab_a_rel[0] = a.at("ab_a_rel").at(0).get<double>();
      c.analysis.ab_a_rel[1] = a.at("ab_a_rel").at(1).get<double>();
    }
    if (a.contains("ab_b_rel")) {
      c.analysis.ab_b_rel[0] = a.at("ab_b_rel").at(0).get<double>();
      c.analysis.ab_b_rel[1] = a.at("ab_b_rel").at(1).get<double>();
    }
  }
  c.validate();
  return c;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["die"] = {{"W1", c.die.W1},           {"ER", c.die.ER},
              {"L1n", c.die.L1n},         {"L2n", c.die.L2n},
              {"R1n", c.die.R1n},         {"R2n", c.die.R2n},
              {"psi_deg", c.die.psi_deg}, {"phi_deg", c.die.phi_deg},
              {"swap_fillets", c.die.swap_fillets}};
  j["billet"] = {{"length", c.billet.length},
                 {"target_element_size", c.billet.target_element_size},
                 {"clearance", c.billet.clearance},
                 {"start_y", c.billet.start_y}};
  j["material"] = {{"E", c.material.E},
                   {"nu", c.material.nu},
                   {"sigma_y0", c.material.sigma_y0},
                   {"H", c.material.H}};
  j["schedule"] = {{"punch_speed", c.schedule.punch_speed},
                   {"pullout_peak_traction_rel", c.schedule.pullout_peak_traction_rel},
                   {"pullout_ramp", c.schedule.pullout_ramp},
                   {"pullout_max_travel", c.schedule.pullout_max_travel},
                   {"snapshot_every_dense", c.schedule.snapshot_every_dense},
                   {"snapshot_every_sparse", c.schedule.snapshot_every_sparse}};
  j["solve"] = {{"newton_tol_force", c.solve.newton_tol_force},
                {"newton_tol_disp", c.solve.newton_tol_disp},
                {"max_newton_iters", c.solve.max_newton_iters},
                {"max_step_cuts", c.solve.max_step_cuts},
                {"line_search", c.solve.line_search},
                {"feed_per_increment_rel", c.solve.feed_per_increment_rel},
                {"regularization_rel", c.solve.regularization_rel},
                {"n_threads", c.solve.n_threads}};
  j["fem"] = {{"integration", c.fem.integration},
              {"hourglass_coefficient", c.fem.hourglass_coefficient},
              {"recovery", c.fem.recovery}};
  j["contact"] = {{"penalty_rel", c.contact.penalty_rel},
                  {"activation_tolerance_rel", c.contact.activation_tolerance_rel}};
  j["analysis"] = {{"section_spacing", c.analysis.section_spacing},
                   {"trim_rel", c.analysis.trim_rel},
                   {"d_threshold_rel", c.analysis.d_threshold_rel},
                   {"window_lo", c.analysis.window_lo},
                   {"window_hi", c.analysis.window_hi},
                   {"ab_a_rel", {c.analysis.ab_a_rel[0], c.analysis.ab_a_rel[1]}},
                   {"ab_b_rel", {c.analysis.ab_b_rel[0], c.analysis.ab_b_rel[1]}}};
  return j;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

std::string serialize_config(const RunConfig& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

RunConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void save_config_file(const RunConfig& cfg, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("config: cannot write '" + path + "'");
  f << serialize_config(cfg);
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  if (name == "smoke") {
    c.billet.target_element_size = 2e-3;
    c.billet.length = 10.0 * c.die.W1;
  } else if (name == "fine") {
    c.billet.target_element_size = 1e-3;
    c.billet.length = 10.0 * c.die.W1;
  } else if (name == "paper") {
    c.billet.target_element_size = 0.758e-3;
    c.billet.length = 22.0 * c.die.W1;
  } else {
    throw ConfigError("config: unknown preset '" + name + "' (smoke, fine, paper)");
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------

void SweepSpec::validate() const {
  if (values.empty()) throw ConfigError("sweep: values must be non-empty");
  for (double v : values) case_config(v).validate();
}

RunConfig SweepSpec::case_config(double value) const {
  RunConfig c = base;
  if (axis == Axis::ER)
    c.die.ER = value;
  else
    c.material.H = value;
  return c;
}

std::string SweepSpec::case_name(int index) const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "case_%02d_%s_%g", index + 1,
                axis == Axis::ER ? "ER" : "H", values[index]);
  return buf;
}

SweepSpec parse_sweep(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("sweep: invalid JSON: ") + e.what());
  }
  check_keys(j, "sweep root", {"base", "preset", "axis", "values"});
  SweepSpec s;
  if (j.contains("preset")) s.base = preset_config(j.at("preset").get<std::string>());
  if (j.contains("base")) s.base = config_from_json(j.at("base"));
  if (!j.contains("axis")) throw ConfigError("sweep: missing 'axis'");
  const std::string ax = j.at("axis").get<std::string>();
  if (ax == "ER")
    s.axis = SweepSpec::Axis::ER;
  else if (ax == "HardeningRate" || ax == "H")
    s.axis = SweepSpec::Axis::HardeningRate;
  else
    throw ConfigError("sweep: axis must be 'ER' or 'HardeningRate'");
  if (!j.contains("values")) throw ConfigError("sweep: missing 'values'");
  s.values = j.at("values").get<std::vector<double>>();
  s.validate();
  return s;
}

SweepSpec load_sweep_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("sweep: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_sweep(ss.str());
}

}  // namespace ecae
