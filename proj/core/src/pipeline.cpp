#include "salmanip/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

#include "salmanip/image_ops.hpp"
#include "salmanip/poisson.hpp"

namespace salmanip {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t search_seed(std::uint64_t seed, int level, int iteration, Polarity p) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(level));
  h = splitmix64(h ^ static_cast<std::uint64_t>(iteration));
  return splitmix64(h ^ (p == Polarity::kPlus ? 1u : 2u));
}

bool has_interior(const Mask& m, int margin) {
  for (int y = margin; y < m.height() - margin; ++y) {
    for (int x = margin; x < m.width() - margin; ++x) {
      if (m(x, y)) return true;
    }
  }
  return false;
}

void add_note(std::vector<std::string>& notes, const std::string& note) {
  if (std::find(notes.begin(), notes.end(), note) == notes.end()) notes.push_back(note);
}

// One level of the pyramid with everything the image update needs.
struct Level {
  const LabImage* source;
  GradientField grad;
  SetupMask setup;
  Mask increase;
  Mask decrease;
  Mask region;
};

class Runner {
 public:
  Runner(const ManipulationConfig& cfg, const RunOptions& opts) : cfg_(cfg), opts_(opts) {
    estimator_ = opts.estimator ? opts.estimator : std::make_shared<PatchPcaSaliency>(cfg.sal);
  }

  ManipulationResult run(const RgbImage& input, const SetupMask& setup_full,
                         const Mask& region_full) {
    const auto start = std::chrono::steady_clock::now();
    check_inputs(input, setup_full, region_full);

    const LabImage lab = rgb_to_lab(input);
    const Pyramid pyr = build_pyramid(lab, cfg_.coarse_width);
    const int n = static_cast<int>(pyr.size());
    const auto schedule = level_schedule(n, cfg_.iters_coarse, cfg_.iters_fine);
    for (const auto& l : pyr.levels) report_.level_widths.push_back(l.width());
    report_.level_iterations.assign(static_cast<std::size_t>(n), 0);

    Level coarse = make_level(pyr.levels[0], setup_full, region_full);
    const SaliencyMap s_i = estimator_->compute(*coarse.source);
    const double psi0 = contrast_psi(s_i, coarse.region, cfg_.contrast());
    report_.initial_psi = psi0;
    report_.final_psi = psi0;
    push_trace({0, 0.0, 1.0, psi0, std::abs(psi0 - cfg_.delta_s)});

    ManipulationResult result;
    if (std::abs(psi0 - cfg_.delta_s) < cfg_.epsilon && !cfg_.pin_thresholds) {
      report_.termination = Termination::kConverged;
      report_.final_thresholds = init_thresholds();
      add_note(report_.notes, "input already within epsilon of delta_s; returned unchanged");
      result.image = input;
      result.lab = lab;
      return finish(std::move(result), lab, setup_full, start);
    }

    LabImage j = *coarse.source;
    Thresholds t = pin_or_init();
    report_.termination = Termination::kIterationCap;
    // The coarse loop is bounded by the database-update cap, not the
    // image-update schedule.
    const int cap = cfg_.max_db_iterations;
    for (int it = 1; it <= cap; ++it) {
      const SaliencyMap s_j_prev = current_saliency(s_i);
      const Thresholds next = cfg_.pin_thresholds
                                  ? t
                                  : update_thresholds(t, s_j_prev, coarse.region, cfg_.delta_s,
                                                      cfg_.schedule(), cfg_.contrast());
      const DatabasePair dbs = databases(*coarse.source, s_i, next);
      j = image_update(j, coarse, dbs, 0, it);
      s_j_ = estimator_->compute(j);
      const double psi = contrast_psi(*s_j_, coarse.region, cfg_.contrast());
      report_.final_psi = psi;
      report_.level_iterations[0] = it;
      push_trace({it, next.tau_plus, next.tau_minus, psi, std::abs(psi - cfg_.delta_s)});

      const Thresholds before = t;
      t = next;
      if (std::abs(psi - cfg_.delta_s) < cfg_.epsilon) {
        report_.termination = Termination::kConverged;
        break;
      }
      if (thresholds_stalled(before, next, cfg_.stall_tol)) {
        report_.termination = Termination::kThresholdStall;
        break;
      }
    }
    report_.final_thresholds = t;

    // Fine-scale refinement: databases fixed by the final thresholds, rebuilt
    // from the input at each scale; the coarse edit is carried up as a
    // bilinearly upsampled difference from the input.
    for (int k = 1; k < n; ++k) {
      const LabImage& prev_src = pyr.levels[static_cast<std::size_t>(k - 1)];
      Level level = make_level(pyr.levels[static_cast<std::size_t>(k)], setup_full, region_full);
      j = carry_up(j, prev_src, *level.source);
      // No saliency is computed at fine scales; the input's coarse map is
      // resampled so the frozen thresholds keep their meaning.
      Plane s_up = resample_to(s_i.plane(), level.source->width(), level.source->height());
      for (double& v : s_up.values()) v = std::clamp(v, 0.0, 1.0);
      const SaliencyMap s_level(std::move(s_up));
      const DatabasePair dbs = databases(*level.source, s_level, t);
      fields_ = {};
      for (int i = 1; i <= schedule[static_cast<std::size_t>(k)]; ++i) {
        j = image_update(j, level, dbs, k, i);
        report_.level_iterations[static_cast<std::size_t>(k)] = i;
      }
    }

    result.image = lab_to_rgb(j);
    result.lab = std::move(j);
    return finish(std::move(result), lab, setup_full, start);
  }

 private:
  void check_inputs(const RgbImage& input, const SetupMask& setup, const Mask& region) const {
    cfg_.validate();
    input.validate();
    if (setup.width() != input.width || setup.height() != input.height ||
        region.width() != input.width || region.height() != input.height) {
      throw InputError("mask size mismatch");
    }
    setup.validate();
    const std::size_t inside = region.count();
    if (inside == 0 || inside == region.size()) throw InputError("degenerate region");
    const int min_side = std::max(cfg_.sal.patch_size, cfg_.synth.patch_size);
    if (input.width < min_side || input.height < min_side) {
      throw InputError("image too small for saliency patch");
    }
  }

  Level make_level(const LabImage& src, const SetupMask& setup_full, const Mask& region_full) {
    Level l;
    l.source = &src;
    l.grad = gradients(src);
    l.setup = resample_setup(setup_full, src.width(), src.height());
    l.increase = l.setup.select(Label::kIncrease);
    l.decrease = l.setup.select(Label::kDecrease);
    l.region = resample_mask(region_full, src.width(), src.height());
    const std::size_t inside = l.region.count();
    if (inside == 0 || inside == l.region.size()) {
      throw InputError("degenerate region at " + std::to_string(src.width()) + " px scale");
    }
    if (l.increase.count() + l.decrease.count() == 0) {
      throw InputError("setup has no editable pixel at " + std::to_string(src.width()) +
                       " px scale");
    }
    return l;
  }

  Thresholds pin_or_init() const { return init_thresholds(); }

  SaliencyMap current_saliency(const SaliencyMap& s_i) const { return s_j_ ? *s_j_ : s_i; }

  DatabasePair databases(const LabImage& src, const SaliencyMap& s, const Thresholds& t) {
    DatabasePair dbs = build_databases(src, s, t, {cfg_.min_db_fraction, cfg_.synth.patch_size / 2});
    for (const auto& msg : dbs.log) add_note(report_.notes, msg);
    return dbs;
  }

  LabImage image_update(const LabImage& j, const Level& level, const DatabasePair& dbs, int k,
                        int it) {
    const int r = cfg_.synth.patch_size / 2;
    std::vector<FieldSource> sources;
    if (has_interior(level.increase, r)) {
      fields_.plus = nn_search(j, level.increase, dbs.plus, cfg_.synth,
                               search_seed(cfg_.seed, k, it, Polarity::kPlus),
                               fields_.plus ? &*fields_.plus : nullptr);
      sources.push_back({&*fields_.plus, &dbs.plus});
    }
    if (has_interior(level.decrease, r)) {
      fields_.minus = nn_search(j, level.decrease, dbs.minus, cfg_.synth,
                                search_seed(cfg_.seed, k, it, Polarity::kMinus),
                                fields_.minus ? &*fields_.minus : nullptr);
      sources.push_back({&*fields_.minus, &dbs.minus});
    }
    VoteResult voted = vote(sources, level.setup, *level.source);
    if (voted.uncovered > 0) {
      add_note(report_.notes, "some editable pixels were not covered by any patch and kept "
                              "their input colour");
    }
    ScreenedPoissonProblem problem{std::move(voted.image), level.grad, cfg_.lambda};
    return solve_screened_poisson(problem, {cfg_.poisson_tol, 10000});
  }

  static LabImage carry_up(const LabImage& j, const LabImage& prev_src, const LabImage& src) {
    LabImage out(src.width(), src.height());
    for (int c = 0; c < LabImage::kChannels; ++c) {
      Plane diff = j.channel(c);
      const auto base = prev_src.channel(c).values();
      auto d = diff.values();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] -= base[i];
      const Plane up = resample_to(diff, src.width(), src.height());
      auto o = out.channel(c).values();
      const auto s = src.channel(c).values();
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = s[i] + up.values()[i];
    }
    return out;
  }

  void push_trace(const TraceEntry& e) {
    report_.trace.push_back(e);
    if (opts_.on_iteration) opts_.on_iteration(e);
  }

  ManipulationResult finish(ManipulationResult result, const LabImage& lab,
                            const SetupMask& setup, std::chrono::steady_clock::time_point start) {
    double keep_sum = 0.0, edit_sum = 0.0;
    std::size_t keep_n = 0, edit_n = 0;
    for (int y = 0; y < lab.height(); ++y) {
      for (int x = 0; x < lab.width(); ++x) {
        double dev = 0.0;
        for (int c = 0; c < 3; ++c) dev += std::abs(result.lab(c, x, y) - lab(c, x, y));
        dev /= 3.0;
        if (setup(x, y) == Label::kKeep) {
          keep_sum += dev;
          ++keep_n;
        } else {
          edit_sum += dev;
          ++edit_n;
        }
      }
    }
    report_.keep_deviation = keep_n ? keep_sum / static_cast<double>(keep_n) : 0.0;
    report_.edit_deviation = edit_n ? edit_sum / static_cast<double>(edit_n) : 0.0;
    report_.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.report = std::move(report_);
    return result;
  }

  struct Fields {
    std::optional<NNField> plus;
    std::optional<NNField> minus;
  };

  const ManipulationConfig& cfg_;
  const RunOptions& opts_;
  std::shared_ptr<const SaliencyEstimator> estimator_;
  RunReport report_;
  Fields fields_;
  std::optional<SaliencyMap> s_j_;
};

}  // namespace

void ManipulationConfig::validate() const {
  if (!(delta_s >= 0.0 && delta_s <= 1.0)) throw InputError("delta_s must be in [0,1]");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("lambda must be >= 0");
  if (!(beta_top > 0.0 && beta_top <= 1.0)) throw InputError("beta_top must be in (0,1]");
  schedule().validate();
  synth.validate();
  sal.validate();
  if (coarse_width < 1) throw InputError("coarse_width must be >= 1");
  if (iters_coarse < 1 || iters_fine < 1) throw InputError("iteration counts must be >= 1");
  if (!(min_db_fraction >= 0.0 && min_db_fraction <= 1.0)) {
    throw InputError("min_db_fraction must be in [0,1]");
  }
  if (!(poisson_tol > 0.0)) throw InputError("poisson_tol must be > 0");
}

SearchSchedule ManipulationConfig::schedule() const {
  return {eta, epsilon, stall_tol, max_db_iterations};
}

std::vector<int> level_schedule(int levels, int iters_coarse, int iters_fine) {
  if (levels < 1) throw InputError("levels must be >= 1");
  std::vector<int> out(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) {
    const double f = levels == 1 ? 0.0 : static_cast<double>(k) / (levels - 1);
    out[static_cast<std::size_t>(k)] =
        static_cast<int>(std::lround(iters_coarse + (iters_fine - iters_coarse) * f));
  }
  return out;
}

ManipulationResult run_manipulation(const RgbImage& input, const Mask& region, Mode mode,
                                    const ManipulationConfig& cfg, const RunOptions& opts) {
  input.validate();
  if (region.width() != input.width || region.height() != input.height) {
    throw InputError("mask size mismatch");
  }
  const SetupMask setup = build_setup(region, mode);
  return Runner(cfg, opts).run(input, setup, contrast_region(region, mode));
}

ManipulationResult run_manipulation(const RgbImage& input, const SetupMask& setup,
                                    const ManipulationConfig& cfg, const RunOptions& opts) {
  input.validate();
  if (setup.width() != input.width || setup.height() != input.height) {
    throw InputError("mask size mismatch");
  }
  setup.validate();
  return Runner(cfg, opts).run(input, setup, contrast_region(setup));
}

SaliencyMap compute_saliency_file(const RgbImage& input, const SaliencyConfig& cfg) {
  return compute_saliency(rgb_to_lab(input), cfg);
}

}  // namespace salmanip
