#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "salmanip/image.hpp"
#include "salmanip/patch_db.hpp"
#include "salmanip/saliency.hpp"
#include "salmanip/setup_mask.hpp"
#include "salmanip/synthesis.hpp"

namespace salmanip {

struct ManipulationConfig {
  double delta_s = 0.6;
  double lambda = 5.0;
  double eta = 0.1;
  double epsilon = 0.05;
  double beta_top = 0.2;
  SynthesisConfig synth;
  SaliencyConfig sal;
  int coarse_width = 150;
  int iters_coarse = 20;
  int iters_fine = 5;
  std::uint64_t seed = 0;

  double stall_tol = 1e-4;
  double min_db_fraction = 0.01;
  int max_db_iterations = 30;
  double poisson_tol = 1e-8;
  /// Debug: hold the thresholds at (0,1) for the whole run.
  bool pin_thresholds = false;

  /// Throws InputError naming the first invalid field.
  void validate() const;

  SearchSchedule schedule() const;
  ContrastParams contrast() const { return {beta_top}; }
};

struct TraceEntry {
  int iteration = 0;
  double tau_plus = 0.0;
  double tau_minus = 1.0;
  double psi = 0.0;
  double e_sal = 0.0;

  bool operator==(const TraceEntry&) const = default;
};

struct RunReport {
  /// Entry 0 is the input; entry k follows the k-th coarse iteration.
  std::vector<TraceEntry> trace;
  Termination termination = Termination::kConverged;
  double initial_psi = 0.0;
  double final_psi = 0.0;
  Thresholds final_thresholds;
  /// Pixel widths of the pyramid levels, coarse to fine.
  std::vector<int> level_widths;
  /// Image updates run per level, coarse to fine.
  std::vector<int> level_iterations;
  /// Mean absolute Lab deviation from the input over Keep / non-Keep pixels
  /// at full resolution (0 when the set is empty).
  double keep_deviation = 0.0;
  double edit_deviation = 0.0;
  std::vector<std::string> notes;
  double wall_time_s = 0.0;
};

/// Called once per coarse iteration, after the trace entry is appended.
using ProgressCallback = std::function<void(const TraceEntry&)>;

struct RunOptions {
  ProgressCallback on_iteration;
  /// Overrides the default patch-PCA estimator when set.
  std::shared_ptr<const SaliencyEstimator> estimator;
};

struct ManipulationResult {
  RgbImage image;
  LabImage lab;
  RunReport report;
};

/// Per-level iteration counts: iters_coarse at the coarsest level falling
/// linearly to iters_fine at the finest.
std::vector<int> level_schedule(int levels, int iters_coarse, int iters_fine);

/// Full manipulation for one of the three named modes.
ManipulationResult run_manipulation(const RgbImage& input, const Mask& region, Mode mode,
                                    const ManipulationConfig& cfg, const RunOptions& opts = {});

/// Hand-made ternary setup; the contrast region is derived from it.
ManipulationResult run_manipulation(const RgbImage& input, const SetupMask& setup,
                                    const ManipulationConfig& cfg, const RunOptions& opts = {});

/// Saliency of an 8-bit image.
SaliencyMap compute_saliency_file(const RgbImage& input, const SaliencyConfig& cfg = {});

}  // namespace salmanip
