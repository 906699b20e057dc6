#include "salmanip/patch_db.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace salmanip {
namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

struct Candidates {
  std::vector<double> values;  // saliency of centres that count toward the minimum
};

Candidates interior_values(const SaliencyMap& s, int margin) {
  Candidates c;
  for (int y = margin; y < s.height() - margin; ++y) {
    for (int x = margin; x < s.width() - margin; ++x) c.values.push_back(s(x, y));
  }
  return c;
}

std::size_t count_interior(const Mask& m, int margin) {
  std::size_t n = 0;
  for (int y = margin; y < m.height() - margin; ++y) {
    for (int x = margin; x < m.width() - margin; ++x) n += m(x, y) ? 1 : 0;
  }
  return n;
}

Mask threshold_mask(const SaliencyMap& s, double threshold, Polarity p) {
  Mask m(s.width(), s.height());
  for (std::size_t i = 0; i < s.size(); ++i) {
    m.set(i, p == Polarity::kPlus ? s.at(i) >= threshold : s.at(i) <= threshold);
  }
  return m;
}

PatchDatabase make_database(const LabImage& source, const SaliencyMap& s, double threshold,
                            Polarity polarity, const DatabaseOptions& opts,
                            std::vector<std::string>& log) {
  PatchDatabase db;
  db.source = source;
  db.polarity = polarity;
  db.threshold = threshold;
  db.valid = threshold_mask(s, threshold, polarity);

  auto cand = interior_values(s, opts.margin);
  if (cand.values.empty()) throw InputError("image too small for the synthesis patch");
  const auto needed = static_cast<std::size_t>(
      std::max(1.0, std::ceil(opts.min_fraction * static_cast<double>(cand.values.size()))));
  if (count_interior(db.valid, opts.margin) >= needed) return db;

  // Quantile that admits `needed` interior centres.
  auto nth = cand.values.begin() + static_cast<std::ptrdiff_t>(needed - 1);
  if (polarity == Polarity::kPlus) {
    std::nth_element(cand.values.begin(), nth, cand.values.end(), std::greater<>());
  } else {
    std::nth_element(cand.values.begin(), nth, cand.values.end());
  }
  db.threshold = *nth;
  db.relaxed = true;
  db.valid = threshold_mask(s, db.threshold, polarity);

  std::ostringstream msg;
  msg << (polarity == Polarity::kPlus ? "D+" : "D-") << " threshold relaxed from " << threshold
      << " to " << db.threshold << " to keep " << needed << " patches";
  log.push_back(msg.str());
  return db;
}

}  // namespace

Thresholds init_thresholds() { return {0.0, 1.0}; }

DatabasePair build_databases(const LabImage& source, const SaliencyMap& source_saliency,
                             const Thresholds& t, const DatabaseOptions& opts) {
  if (source.width() != source_saliency.width() || source.height() != source_saliency.height()) {
    throw InputError("saliency map does not match image size");
  }
  if (!(opts.min_fraction >= 0.0 && opts.min_fraction <= 1.0)) {
    throw InputError("min_fraction must be in [0,1]");
  }
  DatabasePair pair;
  pair.plus = make_database(source, source_saliency, clamp01(t.tau_plus), Polarity::kPlus, opts,
                            pair.log);
  pair.minus = make_database(source, source_saliency, clamp01(t.tau_minus), Polarity::kMinus,
                             opts, pair.log);
  return pair;
}

void SearchSchedule::validate() const {
  if (!(eta > 0.0)) throw InputError("eta must be > 0");
  if (!(epsilon > 0.0)) throw InputError("epsilon must be > 0");
  if (!(stall_tol >= 0.0)) throw InputError("stall_tol must be >= 0");
  if (max_iterations < 1) throw InputError("max_iterations must be >= 1");
}

Thresholds update_thresholds(const Thresholds& t, const SaliencyMap& s_j, const Mask& region,
                             double delta_s, const SearchSchedule& sched,
                             const ContrastParams& params) {
  const double fg = std::abs(contrast_psi(s_j, region, params) - delta_s);
  const double bg = std::abs(contrast_psi(s_j, region.complement(), params) - delta_s);
  return {clamp01(t.tau_plus + sched.eta * fg), clamp01(t.tau_minus - sched.eta * bg)};
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kConverged:
      return "converged";
    case Termination::kThresholdStall:
      return "threshold_stall";
    case Termination::kIterationCap:
      return "iteration_cap";
  }
  return "unknown";
}

bool thresholds_stalled(const Thresholds& before, const Thresholds& after, double stall_tol) {
  return std::abs(after.tau_plus - before.tau_plus) < stall_tol &&
         std::abs(after.tau_minus - before.tau_minus) < stall_tol;
}

std::optional<Termination> check_termination(
    const SaliencyMap& s_j, const Mask& region, double delta_s, const SearchSchedule& sched,
    const ContrastParams& params, const std::optional<std::pair<Thresholds, Thresholds>>& step) {
  if (saliency_energy(s_j, region, delta_s, params) < sched.epsilon) {
    return Termination::kConverged;
  }
  if (step && thresholds_stalled(step->first, step->second, sched.stall_tol)) {
    return Termination::kThresholdStall;
  }
  return std::nullopt;
}

bool converged(const SaliencyMap& s_j, const Mask& region, double delta_s,
               const SearchSchedule& sched, const ContrastParams& params,
               const std::optional<std::pair<Thresholds, Thresholds>>& step) {
  return check_termination(s_j, region, delta_s, sched, params, step).has_value();
}

}  // namespace salmanip
