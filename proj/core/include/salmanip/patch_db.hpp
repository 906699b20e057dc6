#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "salmanip/image.hpp"
#include "salmanip/saliency.hpp"

namespace salmanip {

/// Saliency cut-offs of the salient (plus) and non-salient (minus) databases.
struct Thresholds {
  double tau_plus = 0.0;
  double tau_minus = 1.0;

  bool operator==(const Thresholds&) const = default;
};

/// Both databases start out holding every patch.
Thresholds init_thresholds();

enum class Polarity { kPlus, kMinus };

/// Patches of a (scaled) copy of the input whose centre pixel passes the
/// threshold test. A source patch is admissible iff its centre is valid and
/// the patch lies fully inside the image.
struct PatchDatabase {
  LabImage source;
  Mask valid;
  Polarity polarity = Polarity::kPlus;
  /// Threshold actually applied; differs from the requested one after relaxation.
  double threshold = 0.0;
  bool relaxed = false;
};

struct DatabaseOptions {
  /// Minimum share of candidate centres that must be valid.
  double min_fraction = 0.01;
  /// Centres closer than this to the border do not count toward the minimum
  /// (pass the synthesis patch radius).
  int margin = 0;
};

struct DatabasePair {
  PatchDatabase plus;
  PatchDatabase minus;
  /// Human-readable notes about relaxed thresholds, empty otherwise.
  std::vector<std::string> log;
};

/// plus: S_I >= tau_plus, minus: S_I <= tau_minus. A database that would hold
/// fewer than min_fraction of the candidate centres has its threshold relaxed
/// to the quantile that reaches the minimum.
DatabasePair build_databases(const LabImage& source, const SaliencyMap& source_saliency,
                             const Thresholds& t, const DatabaseOptions& opts = {});

struct SearchSchedule {
  double eta = 0.1;
  double epsilon = 0.05;
  double stall_tol = 1e-4;
  int max_iterations = 30;

  void validate() const;
};

/// One greedy step: tau_plus grows by eta*|psi(S_J,R) - dS|, tau_minus shrinks
/// by eta*|psi(S_J,~R) - dS|; both are clamped to [0,1].
Thresholds update_thresholds(const Thresholds& t, const SaliencyMap& s_j, const Mask& region,
                             double delta_s, const SearchSchedule& sched,
                             const ContrastParams& params = {});

enum class Termination { kConverged, kThresholdStall, kIterationCap };

std::string to_string(Termination t);

/// Converged when |psi - dS| < epsilon; stalled when the latest update moved
/// neither threshold by stall_tol or more. `step` is (before, after) of the
/// latest update, absent before the first one.
std::optional<Termination> check_termination(
    const SaliencyMap& s_j, const Mask& region, double delta_s, const SearchSchedule& sched,
    const ContrastParams& params,
    const std::optional<std::pair<Thresholds, Thresholds>>& step = std::nullopt);

bool converged(const SaliencyMap& s_j, const Mask& region, double delta_s,
               const SearchSchedule& sched, const ContrastParams& params,
               const std::optional<std::pair<Thresholds, Thresholds>>& step = std::nullopt);

/// Stall half of the stopping rule on its own.
bool thresholds_stalled(const Thresholds& before, const Thresholds& after, double stall_tol);

}  // namespace salmanip
