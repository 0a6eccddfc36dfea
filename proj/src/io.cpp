#include "ecae/io.hpp"

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ecae {

namespace fs = std::filesystem;
using nlohmann::json;

void ensure_dir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw IoError("io: cannot create directory '" + path + "': " + ec.message());
}

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_file(const std::string& path, const char* mode) {
  File f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("io: cannot open '" + path + "'");
  return f;
}

void put_u32(std::FILE* f, uint32_t v) { std::fwrite(&v, 4, 1, f); }
void put_i32(std::FILE* f, int32_t v) { std::fwrite(&v, 4, 1, f); }
void put_f64(std::FILE* f, double v) { std::fwrite(&v, 8, 1, f); }
uint32_t get_u32(std::FILE* f) {
  uint32_t v = 0;
  if (std::fread(&v, 4, 1, f) != 1) throw IoError("io: truncated snapshot file");
  return v;
}
int32_t get_i32(std::FILE* f) {
  int32_t v = 0;
  if (std::fread(&v, 4, 1, f) != 1) throw IoError("io: truncated snapshot file");
  return v;
}
double get_f64(std::FILE* f) {
  double v = 0;
  if (std::fread(&v, 8, 1, f) != 1) throw IoError("io: truncated snapshot file");
  return v;
}

constexpr uint32_t kMagic = 0x4e534345;  // "ECSN"
constexpr uint32_t kVersion = 1;

}  // namespace

void write_snapshot_file(const FieldSnapshot& s, const std::string& path) {
  File f = open_file(path, "wb");
  put_u32(f.get(), kMagic);
  put_u32(f.get(), kVersion);
  put_u32(f.get(), uint32_t(s.coords.size()));
  put_u32(f.get(), uint32_t(s.states.size()));
  put_u32(f.get(), uint32_t(s.contact.size()));
  put_f64(f.get(), s.time);
  put_i32(f.get(), int32_t(s.phase));
  put_i32(f.get(), s.increment);
  put_f64(f.get(), s.punch_travel);
  for (const Vec2& p : s.coords) {
    put_f64(f.get(), p.x);
    put_f64(f.get(), p.y);
  }
  for (const ElementState& e : s.states) {
    for (int g = 0; g < 4; ++g) {
      for (int c = 0; c < 4; ++c) put_f64(f.get(), e.gp[g].sigma[c]);
      put_f64(f.get(), e.gp[g].eqps);
    }
    put_f64(f.get(), e.hg_force.x);
    put_f64(f.get(), e.hg_force.y);
  }
  for (const NodeContact& c : s.contact) {
    put_i32(f.get(), c.node);
    put_i32(f.get(), int32_t(c.wall));
    put_i32(f.get(), c.active ? 1 : 0);
    put_f64(f.get(), c.gap);
    put_f64(f.get(), c.normal_force);
    put_f64(f.get(), c.normal.x);
    put_f64(f.get(), c.normal.y);
  }
}

FieldSnapshot read_snapshot_file(const std::string& path) {
  File f = open_file(path, "rb");
  if (get_u32(f.get()) != kMagic) throw IoError("io: bad snapshot magic in '" + path + "'");
  if (get_u32(f.get()) != kVersion) throw IoError("io: unsupported snapshot version");
  FieldSnapshot s;
  const uint32_t nn = get_u32(f.get());
  const uint32_t ne = get_u32(f.get());
  const uint32_t nc = get_u32(f.get());
  s.time = get_f64(f.get());
  s.phase = Phase(get_i32(f.get()));
  s.increment = get_i32(f.get());
  s.punch_travel = get_f64(f.get());
  s.coords.resize(nn);
  for (Vec2& p : s.coords) {
    p.x = get_f64(f.get());
    p.y = get_f64(f.get());
  }
  s.states.resize(ne);
  for (ElementState& e : s.states) {
    for (int g = 0; g < 4; ++g) {
      for (int c = 0; c < 4; ++c) e.gp[g].sigma[c] = get_f64(f.get());
      e.gp[g].eqps = get_f64(f.get());
    }
    e.hg_force.x = get_f64(f.get());
    e.hg_force.y = get_f64(f.get());
  }
  s.contact.resize(nc);
  for (NodeContact& c : s.contact) {
    c.node = get_i32(f.get());
    c.wall = WallId(get_i32(f.get()));
    c.active = get_i32(f.get()) != 0;
    c.gap = get_f64(f.get());
    c.normal_force = get_f64(f.get());
    c.normal.x = get_f64(f.get());
    c.normal.y = get_f64(f.get());
  }
  return s;
}

// ---------------------------------------------------------------------------

RunWriter::RunWriter(std::string dir, const RunConfig& cfg) : dir_(std::move(dir)) {
  ensure_dir(dir_);
  ensure_dir(dir_ + "/snapshots");
  save_config_file(cfg, dir_ + "/config.json");
}

void RunWriter::on_snapshot(const FieldSnapshot& s) {
  char name[32];
  std::snprintf(name, sizeof(name), "snap_%06d.bin", next_);
  write_snapshot_file(s, dir_ + "/snapshots/" + name);
  std::ostringstream line;
  line << next_ << ',' << g17(s.time) << ',' << int(s.phase) << ',' << s.increment << ','
       << name;
  index_lines_.push_back(line.str());
  ++next_;
}

void RunWriter::finalize(const RunStats& stats) {
  {
    std::ofstream idx(dir_ + "/snapshots/index.csv");
    idx << "idx,time,phase,increment,file\n";
    for (const std::string& l : index_lines_) idx << l << "\n";
  }
  json meta;
  meta["schema_version"] = 1;
  meta["increments"] = stats.increments;
  meta["step_cuts"] = stats.step_cuts;
  meta["newton_iterations"] = stats.newton_iterations;
  meta["snapshots"] = stats.snapshots;
  meta["pullout_capped"] = stats.pullout_capped;
  meta["end_time"] = stats.end_time;
  meta["final_penalty"] = stats.final_penalty;
  std::ofstream m(dir_ + "/meta.json");
  m << meta.dump(2) << "\n";
}

RunReader::RunReader(std::string dir) : dir_(std::move(dir)) {
  cfg_ = load_config_file(dir_ + "/config.json");
  std::ifstream idx(dir_ + "/snapshots/index.csv");
  if (!idx) throw IoError("io: missing snapshot index in '" + dir_ + "'");
  std::string line;
  std::getline(idx, line);  // header
  while (std::getline(idx, line)) {
    if (line.empty()) continue;
    Entry e;
    int id = 0, phase = 0;
    char file[64] = {0};
    if (std::sscanf(line.c_str(), "%d,%lf,%d,%d,%63s", &id, &e.time, &phase, &e.increment,
                    file) != 5)
      throw IoError("io: bad index line '" + line + "'");
    e.phase = Phase(phase);
    e.file = file;
    entries_.push_back(e);
  }
}

FieldSnapshot RunReader::load(int i) const {
  return read_snapshot_file(dir_ + "/snapshots/" + entries_[i].file);
}

// ---------------------------------------------------------------------------

void write_sections_csv(const std::vector<SectionProfile>& sections, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("io: cannot write '" + path + "'");
  f << "section_id,arclength_s,h,h_b,max_sigma_xx\n";
  for (const SectionProfile& s : sections)
    f << s.section_id << ',' << g17(s.arclength_s) << ',' << g17(s.h) << ',' << g17(s.h_b)
      << ',' << g17(s.max_sigma_xx) << "\n";
}

void write_curve_csv(const OscillationReport& rep, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("io: cannot write '" + path + "'");
  f << "s,max_sigma_xx\n";
  for (size_t i = 0; i < rep.s_grid.size(); ++i)
    f << g17(rep.s_grid[i]) << ',' << g17(rep.signal[i]) << "\n";
}

void write_spectrum_csv(const OscillationReport& rep, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("io: cannot write '" + path + "'");
  f << "spatial_frequency,amplitude\n";
  for (size_t i = 0; i < rep.freq.size(); ++i)
    f << g17(rep.freq[i]) << ',' << g17(rep.amplitude[i]) << "\n";
}

void write_trace_csv(const ContactTrace& tr, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("io: cannot write '" + path + "'");
  f << "time,x,sigma_yy\n";
  for (size_t i = 0; i < tr.times.size(); ++i)
    for (size_t k = 0; k < tr.x[i].size(); ++k)
      f << g17(tr.times[i]) << ',' << g17(tr.x[i][k]) << ',' << g17(tr.syy[i][k]) << "\n";
}

void write_convergence_csv(const ConvergenceReport& rep, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("io: cannot write '" + path + "'");
  f << "size_coarse,size_fine,l2_rel,max_rel\n";
  for (const ConvergencePair& p : rep.pairs)
    f << g17(p.size_coarse) << ',' << g17(p.size_fine) << ',' << g17(p.l2_rel) << ','
      << g17(p.max_rel) << "\n";
}

void write_mesh_csv(const Mesh& mesh, const std::string& nodes_path,
                    const std::string& elems_path) {
  std::ofstream fn(nodes_path);
  if (!fn) throw IoError("io: cannot write '" + nodes_path + "'");
  fn << "id,x,y\n";
  for (int i = 0; i < mesh.n_nodes(); ++i)
    fn << i << ',' << g17(mesh.nodes[i].x) << ',' << g17(mesh.nodes[i].y) << "\n";
  std::ofstream fe(elems_path);
  if (!fe) throw IoError("io: cannot write '" + elems_path + "'");
  fe << "id,n1,n2,n3,n4\n";
  for (int e = 0; e < mesh.n_elems(); ++e)
    fe << e << ',' << mesh.elems[e][0] << ',' << mesh.elems[e][1] << ',' << mesh.elems[e][2]
       << ',' << mesh.elems[e][3] << "\n";
}

void write_boundary_csv(const std::vector<DieWall>& walls, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("io: cannot write '" + path + "'");
  f << "wall,point,x,y\n";
  for (const auto& [id, pts] : boundary_polyline(walls)) {
    int k = 0;
    for (const Vec2& p : pts)
      f << wall_name(id) << ',' << k++ << ',' << g17(p.x) << ',' << g17(p.y) << "\n";
  }
}

// ---------------------------------------------------------------------------

void write_svg_plot(const std::vector<PlotSeries>& series, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::string& path) {
  const int W = 960, H = 540, ml = 70, mr = 20, mt = 40, mb = 50;
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const PlotSeries& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  if (xhi <= xlo) xhi = xlo + 1.0;
  if (yhi <= ylo) yhi = ylo + 1.0;
  const double padding = 0.05 * (yhi - ylo);
  ylo -= padding;
  yhi += padding;
  auto px = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - ylo) / (yhi - ylo) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                 "#9467bd", "#8c564b", "#7f7f7f"};

  std::ofstream f(path);
  if (!f) throw IoError("io: cannot write '" + path + "'");
  f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  f << "<rect width='100%' height='100%' fill='white'/>\n";
  f << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
    << "</text>\n";
  f << "<text x='" << W / 2 << "' y='" << H - 12 << "' text-anchor='middle' font-size='13'>"
    << xlabel << "</text>\n";
  f << "<text x='18' y='" << H / 2
    << "' text-anchor='middle' font-size='13' transform='rotate(-90 18 " << H / 2 << ")'>"
    << ylabel << "</text>\n";
  f << "<rect x='" << ml << "' y='" << mt << "' width='" << W - ml - mr << "' height='"
    << H - mt - mb << "' fill='none' stroke='black'/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xlo + k * (xhi - xlo) / 4, yv = ylo + k * (yhi - ylo) / 4;
    f << "<text x='" << px(xv) << "' y='" << H - mb + 16
      << "' text-anchor='middle' font-size='11'>" << g17(xv).substr(0, 9) << "</text>\n";
    f << "<text x='" << ml - 6 << "' y='" << py(yv) + 4
      << "' text-anchor='end' font-size='11'>" << g17(yv).substr(0, 9) << "</text>\n";
  }
  int ci = 0;
  for (const PlotSeries& s : series) {
    const char* color = colors[ci % 7];
    f << "<polyline fill='none' stroke='" << color << "' stroke-width='1.3' points='";
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      f << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    f << "'/>\n";
    if (!s.label.empty())
      f << "<text x='" << W - mr - 8 << "' y='" << mt + 16 + 16 * ci
        << "' text-anchor='end' font-size='12' fill='" << color << "'>" << s.label
        << "</text>\n";
    ++ci;
  }
  f << "</svg>\n";
}

}  // namespace ecae
