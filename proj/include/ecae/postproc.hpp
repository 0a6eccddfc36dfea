#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "ecae/solver.hpp"

namespace ecae {

struct PostprocError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RecoveryMethod { VolumeWeightedAverage, SuperconvergentPatch };

// Integration-point stresses extrapolated to nodes. The default method
// volume-averages the per-element corner extrapolations of adjacent
// elements; the alternative fits a linear polynomial per nodal patch.
std::vector<std::array<double, 4>> recover_nodal_stress(
    const FieldSnapshot& snap, const Mesh& mesh, const ElementFormulation& form,
    RecoveryMethod method = RecoveryMethod::VolumeWeightedAverage);

// ---------------------------------------------------------------------------
// Sections along the extrudate.

struct SectionProfile {
  int section_id = 0;
  double arclength_s = 0.0;            // along the medial axis, from the head
  std::vector<double> nd_coordinate;   // through-thickness positions, bottom -> top
  std::vector<double> sigma_xx_nd;     // sampled profile
  double max_sigma_xx = 0.0;
  double h = 0.0;    // local thickness
  double h_b = 0.0;  // offset of the maximizer from the bottom surface
};

struct SectionParams {
  double spacing = 1e-3;      // m between stations
  double trim_head = 0.0;     // m discarded at the head end
  double trim_tail = 0.0;     // m discarded at the tail end
  int smooth_window = 5;      // medial-axis moving average
};

// Sections perpendicular to the medial axis of the deformed extrudate. The
// bottom surface is the billet's original left face, the top the original
// right face. h_b ties break to the bottom-most maximizer.
std::vector<SectionProfile> build_sections(
    const FieldSnapshot& final_snap, const Mesh& mesh, const ElementFormulation& form,
    const SectionParams& params,
    RecoveryMethod method = RecoveryMethod::VolumeWeightedAverage);

// ---------------------------------------------------------------------------
// Longitudinal oscillation analysis.

enum class Classification { Periodic, Aperiodic, Steady };

const char* classification_name(Classification c);

struct OscillationReport {
  std::vector<double> s_grid;     // uniform LD stations
  std::vector<double> signal;     // max sectional sigma_xx
  std::vector<double> freq;       // 1/m, bins 1..N/2
  std::vector<double> amplitude;  // Hann-windowed amplitude spectrum
  std::optional<double> dominant_frequency;
  double dominant_energy_share = 0.0;
  Classification classification = Classification::Steady;
  double D = 0.0;  // peak-to-peak over one cycle (Periodic) or the window
};

struct OscillationParams {
  double d_threshold = 8e6;        // Pa; Steady when D stays below this
  double peak_median_ratio = 3.0;  // dominant peak must exceed ratio * median
  double energy_share_min = 0.5;   // of detrended spectral energy
};

OscillationReport longitudinal_curve(const std::vector<SectionProfile>& sections,
                                     const OscillationParams& params);

// Amplitude spectrum of a mean-detrended, Hann-windowed signal (naive DFT;
// section counts are small).
struct Spectrum {
  std::vector<double> freq;
  std::vector<double> amplitude;
  std::vector<std::complex<double>> coef;  // bins 0..N/2
  double window_sum = 0.0;
};
Spectrum hann_spectrum(const std::vector<double>& signal, double ds);

// ---------------------------------------------------------------------------
// Mesh-convergence comparison along a material line.

struct MaterialLineSample {
  double element_size = 0.0;
  Vec2 a, b;                 // billet-local endpoints
  std::vector<double> t;     // normalized position along a-b
  std::vector<double> sxx;   // recovered nodal values
};

MaterialLineSample sample_material_line(const FieldSnapshot& snap, const Mesh& mesh,
                                        const ElementFormulation& form, const Vec2& a,
                                        const Vec2& b,
                                        RecoveryMethod method =
                                            RecoveryMethod::VolumeWeightedAverage);

struct ConvergencePair {
  double size_coarse = 0.0, size_fine = 0.0;
  double l2_rel = 0.0, max_rel = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergencePair> pairs;  // successive sizes, coarse to fine
  bool converged = false;              // finest pair under the threshold
  double selected_size = 0.0;          // coarser of the last two when converged
  double threshold = 0.05;
};

ConvergenceReport compare_material_line(std::vector<MaterialLineSample> runs,
                                        double threshold = 0.05);

// ---------------------------------------------------------------------------
// Contact-state tracing in the exit channel.

enum class Surface { Top, Bottom };

struct ContactTrace {
  Surface surface = Surface::Top;
  std::vector<double> times;
  std::vector<std::vector<double>> x;    // node positions inside the window, per time
  std::vector<std::vector<double>> syy;  // recovered nodal sigma_yy, per time
  std::vector<double> locus;             // compression-weighted centroid (NaN if none)
  std::optional<double> recurrence_period;
  double locus_range = 0.0;  // max - min over instants with defined locus
};

struct TraceParams {
  double window_lo = 0.0, window_hi = 0.0;  // die-frame x interval
  double t_lo = 0.0;
  double t_hi = std::numeric_limits<double>::max();
};

ContactTrace trace_contact(const SnapshotSource& snaps, const Mesh& mesh,
                           const ElementFormulation& form, const TraceParams& params,
                           Surface surface,
                           RecoveryMethod method = RecoveryMethod::VolumeWeightedAverage);

// First significant autocorrelation peak of v(t) after resampling onto a
// uniform grid; returns the lag in seconds.
std::optional<double> autocorrelation_period(const std::vector<double>& t,
                                             const std::vector<double>& v,
                                             double min_corr = 0.2);

}  // namespace ecae
