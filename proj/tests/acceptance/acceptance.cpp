// Prints one PASS/FAIL line per acceptance criterion. Exit status is 0 only
// when every hard criterion passes; the runtime envelope is recorded only.
//
// usage: salmanip_acceptance <path-to-salmanip-cli> [work-dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "json.hpp"
#include "oracles.hpp"
#include "salmanip/image_ops.hpp"
#include "salmanip/metrics.hpp"
#include "salmanip/pipeline.hpp"
#include "salmanip/png_io.hpp"
#include "salmanip/poisson.hpp"
#include "salmanip/synthesis.hpp"
#include "synthetic.hpp"

namespace {

using namespace salmanip;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kFixedPointPsnr = 48.0;
constexpr int kFixedPointMaxStep = 1;
constexpr double kFixedPointSeconds = 60.0;
constexpr int kSuiteSize = 10;
constexpr double kTargetContrast = 0.6;
constexpr double kMinGain = 0.15;
constexpr int kMinGainCount = 9;
constexpr double kSweep[] = {0.4, 0.6, 0.8};
constexpr double kMonotoneSlack = 0.02;
constexpr int kNnImages = 20;
constexpr double kNnRatio = 1.05;
constexpr int kPoissonProblems = 50;
constexpr double kPoissonIdentityTol = 1e-8;
constexpr double kPoissonResidualTol = 1e-8;
constexpr double kPoissonStiffLambda = 1e6;
constexpr double kPoissonStiffTol = 1e-3;
constexpr int kCcPairs = 100;
constexpr double kCcTol = 1e-12;
constexpr double kConvergenceEpsilon = 0.05;
constexpr double kEnvelopeSeconds = 150.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int g_hard_failures = 0;

void print(int id, const std::string& name, const Outcome& o, bool hard = true) {
  std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << "  " << name;
  if (!hard) std::cout << " (recorded, not enforced)";
  std::cout << "  -- " << o.detail << std::endl;
  if (!o.pass && hard) ++g_hard_failures;
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(prec);
  s << v;
  return s.str();
}

double psnr(const RgbImage& a, const RgbImage& b) {
  double se = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = double(a.data[i]) - double(b.data[i]);
    se += d * d;
  }
  if (se == 0.0) return INFINITY;
  return 10.0 * std::log10(255.0 * 255.0 / (se / static_cast<double>(a.data.size())));
}

// 1: pinned thresholds leave the image unchanged.
Outcome fixed_point() {
  const testing::SyntheticScene scene = testing::make_scene(3);
  Mask box(288, 256);
  for (int y = 64; y < 192; ++y) {
    for (int x = 72; x < 216; ++x) box.set(x, y, true);
  }
  const std::vector<std::pair<RgbImage, Mask>> cases = {
      {testing::structured_rgb(11, 256, 256), scene.region},
      {scene.image, scene.region},
      {testing::random_rgb(12, 288, 256), box}};
  ManipulationConfig cfg;
  cfg.pin_thresholds = true;
  Outcome o;
  std::ostringstream d;
  for (const auto& [img, region] : cases) {
    const auto t = Clock::now();
    const ManipulationResult res = run_manipulation(img, region, Mode::kEnhance, cfg);
    const double secs = seconds_since(t);
    int worst = 0;
    for (std::size_t i = 0; i < img.data.size(); ++i) {
      worst = std::max(worst, std::abs(int(res.image.data[i]) - int(img.data[i])));
    }
    const double p = psnr(img, res.image);
    o.pass = o.pass && worst <= kFixedPointMaxStep && p >= kFixedPointPsnr &&
             secs < kFixedPointSeconds;
    d << img.width << "x" << img.height << ": max step " << worst << ", PSNR "
      << (std::isinf(p) ? std::string("inf") : fmt(p, 1)) << " dB, " << fmt(secs, 1) << " s; ";
  }
  o.detail = d.str();
  return o;
}

struct SuiteRun {
  double psi_in = 0.0;
  double psi_out = 0.0;
  RunReport report;
};

// Contrast is measured on the 8-bit images a user would read and write.
std::vector<std::vector<SuiteRun>> run_suite() {
  std::vector<std::vector<SuiteRun>> runs(kSuiteSize);
  for (int s = 0; s < kSuiteSize; ++s) {
    const testing::SyntheticScene scene = testing::make_scene(static_cast<std::uint64_t>(s));
    const double psi_in = contrast_psi(compute_saliency_file(scene.image), scene.region);
    for (double ds : kSweep) {
      ManipulationConfig cfg;
      cfg.delta_s = ds;
      const auto t = Clock::now();
      ManipulationResult res = run_manipulation(scene.image, scene.region, Mode::kEnhance, cfg);
      const double psi_out = contrast_psi(compute_saliency_file(res.image), scene.region);
      std::cerr << "  scene " << s << " dS=" << ds << ": psi " << fmt(psi_in) << " -> "
                << fmt(psi_out) << " (" << to_string(res.report.termination) << ", "
                << res.report.trace.size() - 1 << " it, " << fmt(seconds_since(t), 1) << " s)\n";
      runs[s].push_back({psi_in, psi_out, std::move(res.report)});
    }
  }
  return runs;
}

std::size_t sweep_index(double ds) {
  return static_cast<std::size_t>(std::find(std::begin(kSweep), std::end(kSweep), ds) -
                                  std::begin(kSweep));
}

// 2: enhancement efficacy at the target contrast.
Outcome efficacy(const std::vector<std::vector<SuiteRun>>& runs) {
  const std::size_t k = sweep_index(kTargetContrast);
  int gained = 0;
  bool converged_ok = true;
  std::ostringstream gains;
  for (const auto& per_scene : runs) {
    const SuiteRun& r = per_scene[k];
    const double gain = r.psi_out - r.psi_in;
    if (gain >= kMinGain) ++gained;
    if (r.report.termination == Termination::kConverged &&
        !(std::abs(r.psi_out - kTargetContrast) < std::abs(r.psi_in - kTargetContrast))) {
      converged_ok = false;
    }
    gains << fmt(gain, 3) << ' ';
  }
  Outcome o;
  o.pass = gained >= kMinGainCount && converged_ok;
  o.detail = std::to_string(gained) + "/" + std::to_string(kSuiteSize) + " gained >= " +
             fmt(kMinGain, 2) + " (gains: " + gains.str() + ")" +
             (converged_ok ? "" : "; a converged run did not move toward the target");
  return o;
}

// 3: final contrast follows the target.
Outcome monotone(const std::vector<std::vector<SuiteRun>>& runs) {
  int ok = 0;
  std::ostringstream d;
  for (const auto& per_scene : runs) {
    bool mono = true;
    for (std::size_t i = 1; i < per_scene.size(); ++i) {
      if (per_scene[i].psi_out < per_scene[i - 1].psi_out - kMonotoneSlack) mono = false;
    }
    if (mono) ++ok;
    d << '[';
    for (std::size_t i = 0; i < per_scene.size(); ++i) {
      d << (i ? " " : "") << fmt(per_scene[i].psi_out, 3);
    }
    d << "] ";
  }
  Outcome o;
  o.pass = ok == kSuiteSize;
  o.detail = std::to_string(ok) + "/" + std::to_string(kSuiteSize) +
             " monotone within " + fmt(kMonotoneSlack, 2) + "; psi at dS=0.4/0.6/0.8: " + d.str();
  return o;
}

LabImage random_lab(int w, int h, std::mt19937& rng) {
  std::uniform_real_distribution<double> l(0.0, 100.0), ab(-60.0, 60.0);
  LabImage img(w, h);
  for (double& v : img.channel(0).values()) v = l(rng);
  for (int c = 1; c < 3; ++c) {
    for (double& v : img.channel(c).values()) v = ab(rng);
  }
  return img;
}

// 4: PatchMatch against exhaustive search.
Outcome patchmatch() {
  std::mt19937 rng(4);
  const SynthesisConfig cfg{7, 10, 0.5};
  const Mask all(16, 16, true);
  double worst_ratio = 0.0;
  bool self_exact = true;
  for (int k = 0; k < kNnImages; ++k) {
    const LabImage target = random_lab(16, 16, rng), source = random_lab(16, 16, rng);
    PatchDatabase db;
    db.source = source;
    db.valid = all;
    const double fast = nn_search(target, all, db, cfg, static_cast<std::uint64_t>(k)).mean_distance();
    const double exact = testing::exhaustive_nn_mean(target, source, all, cfg.patch_size);
    worst_ratio = std::max(worst_ratio, fast / exact);

    PatchDatabase self;
    self.source = target;
    self.valid = all;
    if (nn_search(target, all, self, cfg, static_cast<std::uint64_t>(k)).total_distance() != 0.0) {
      self_exact = false;
    }
  }
  Outcome o;
  o.pass = worst_ratio <= kNnRatio && self_exact;
  o.detail = "worst mean-distance ratio " + fmt(worst_ratio, 4) + " over " +
             std::to_string(kNnImages) + " images; self-search distance " +
             (self_exact ? "0 on all" : "nonzero on some");
  return o;
}

Plane random_plane(std::mt19937& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Plane p(8, 8);
  for (double& v : p.values()) v = u(rng);
  return p;
}

// 5: screened Poisson.
Outcome poisson() {
  std::mt19937 rng(5);
  bool a_ok = true;
  double b_worst = 0.0, c_worst = 0.0, d_worst = 0.0;
  for (int k = 0; k < kPoissonProblems; ++k) {
    const Plane v = random_plane(rng, 50.0);
    const Plane gx = random_plane(rng, 10.0), gy = random_plane(rng, 10.0);

    if (!(solve_screened_poisson(v, gx, gy, 0.0) == v)) a_ok = false;

    LabImage img(8, 8);
    img.channel(0) = v;
    const GradientField g = gradients(img);
    const Plane same = solve_screened_poisson(v, g.dx[0], g.dy[0], 5.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      b_worst = std::max(b_worst, std::abs(same.values()[i] - v.values()[i]));
    }

    const Plane x = solve_screened_poisson(v, gx, gy, 5.0);
    c_worst = std::max(c_worst, testing::screened_poisson_residual(x, v, gx, gy, 5.0));

    LabImage target(8, 8);
    target.channel(0) = random_plane(rng, 50.0);
    const GradientField tg = gradients(target);
    const Plane stiff = solve_screened_poisson(v, tg.dx[0], tg.dy[0], kPoissonStiffLambda);
    for (int y = 0; y < 8; ++y) {
      for (int i = 0; i < 8; ++i) {
        if (i + 1 < 8) {
          d_worst = std::max(d_worst, std::abs(stiff(i + 1, y) - stiff(i, y) - tg.dx[0](i, y)));
        }
        if (y + 1 < 8) {
          d_worst = std::max(d_worst, std::abs(stiff(i, y + 1) - stiff(i, y) - tg.dy[0](i, y)));
        }
      }
    }
  }
  Outcome o;
  o.pass = a_ok && b_worst <= kPoissonIdentityTol && c_worst <= kPoissonResidualTol &&
           d_worst < kPoissonStiffTol;
  std::ostringstream d;
  d.precision(3);
  d << "(a) " << (a_ok ? "bit-exact" : "differs") << "; (b) max error " << b_worst
    << "; (c) max relative residual " << c_worst << "; (d) max gradient deviation " << d_worst;
  o.detail = d.str();
  return o;
}

// 6: metric oracles.
Outcome metrics() {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < kCcPairs; ++k) {
    Plane p(12, 10);
    for (double& v : p.values()) v = u(rng);
    Mask gt(12, 10);
    for (std::size_t i = 0; i < gt.size(); ++i) gt.set(i, u(rng) < 0.3);
    gt.set(0, true);
    gt.set(1, false);
    Plane g(12, 10);
    for (std::size_t i = 0; i < gt.size(); ++i) g.values()[i] = gt.at(i) ? 1.0 : 0.0;
    worst = std::max(worst, std::abs(pearson_cc({p, gt}) - testing::pearson_oracle(p, g)));
  }
  Plane s(16, 16);
  for (double& v : s.values()) v = u(rng);
  Plane s2 = s;
  for (double& v : s2.values()) v = 2.0 * v + 3.0;
  const double affine = pearson_cc(s, s2);

  Mask gt(16, 16);
  for (int y = 4; y < 11; ++y) {
    for (int x = 3; x < 9; ++x) gt.set(x, y, true);
  }
  Plane exact(16, 16);
  for (std::size_t i = 0; i < gt.size(); ++i) exact.values()[i] = gt.at(i) ? 1.0 : 0.0;
  const double wfb_exact = weighted_fbeta({exact, gt});
  const double wfb_zero = weighted_fbeta({Plane(16, 16), gt});

  Outcome o;
  o.pass = worst <= kCcTol && std::abs(affine - 1.0) <= kCcTol && wfb_exact == 1.0 &&
           wfb_zero == 0.0;
  std::ostringstream d;
  d.precision(3);
  d << "cc oracle max diff " << worst << " over " << kCcPairs << " pairs; cc(S, 2S+3) = "
    << std::setprecision(15) << affine << "; wfb exact = " << wfb_exact
    << ", all-zero = " << wfb_zero;
  o.detail = d.str();
  return o;
}

// 7: threshold bookkeeping over every suite run.
Outcome bookkeeping(const std::vector<std::vector<SuiteRun>>& runs) {
  int checked = 0;
  std::string problem;
  if (ManipulationConfig{}.epsilon != kConvergenceEpsilon) problem = "default epsilon differs";
  for (std::size_t s = 0; s < runs.size(); ++s) {
    for (std::size_t k = 0; k < runs[s].size(); ++k) {
      const RunReport& r = runs[s][k].report;
      const double ds = kSweep[k];
      const std::string where = "scene " + std::to_string(s) + " dS=" + fmt(ds, 1) + ": ";
      ++checked;
      for (std::size_t i = 0; i < r.trace.size(); ++i) {
        const TraceEntry& e = r.trace[i];
        if (e.tau_plus < 0.0 || e.tau_plus > 1.0 || e.tau_minus < 0.0 || e.tau_minus > 1.0) {
          problem = where + "threshold outside [0,1]";
        }
        if (i > 0 && (e.tau_plus < r.trace[i - 1].tau_plus ||
                      e.tau_minus > r.trace[i - 1].tau_minus)) {
          problem = where + "threshold moved the wrong way";
        }
        // The run must stop at the first entry within epsilon of the target.
        const bool within = std::abs(e.psi - ds) < kConvergenceEpsilon;
        if (within && i + 1 != r.trace.size()) problem = where + "ran past convergence";
      }
      const bool last_within = std::abs(r.trace.back().psi - ds) < kConvergenceEpsilon;
      if ((r.termination == Termination::kConverged) != last_within) {
        problem = where + "termination disagrees with the epsilon test";
      }
      if (r.termination != Termination::kConverged &&
          r.termination != Termination::kThresholdStall &&
          r.termination != Termination::kIterationCap) {
        problem = where + "unknown termination";
      }
    }
  }
  Outcome o;
  o.pass = problem.empty();
  o.detail = std::to_string(checked) + " runs checked" + (problem.empty() ? "" : "; " + problem);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

// 8: two identical CLI invocations.
Outcome determinism(const fs::path& cli, const fs::path& work) {
  const testing::SyntheticScene scene = testing::make_scene(5);
  png::write_rgb(work / "in.png", scene.image);
  GrayImage m(scene.region.width(), scene.region.height());
  for (std::size_t i = 0; i < scene.region.size(); ++i) m.data[i] = scene.region.at(i) ? 255 : 0;
  png::write_gray(work / "mask.png", m);

  Outcome o;
  for (int k = 1; k <= 2; ++k) {
    const std::string n = std::to_string(k);
    const std::string cmd = quote(cli) + " enhance --input " + quote(work / "in.png") +
                            " --mask " + quote(work / "mask.png") + " --output " +
                            quote(work / ("out" + n + ".png")) + " --report " +
                            quote(work / ("report" + n + ".json")) + " --seed 0 > /dev/null";
    if (std::system(cmd.c_str()) != 0) {
      o.pass = false;
      o.detail = "CLI invocation failed: " + cmd;
      return o;
    }
  }
  const bool same_png = slurp(work / "out1.png") == slurp(work / "out2.png");
  auto r1 = nlohmann::json::parse(slurp(work / "report1.json"));
  auto r2 = nlohmann::json::parse(slurp(work / "report2.json"));
  r1.erase("wall_time_s");
  r2.erase("wall_time_s");
  o.pass = same_png && r1 == r2;
  o.detail = std::string("result PNGs ") + (same_png ? "byte-identical" : "differ") +
             "; reports (excluding wall time) " + (r1 == r2 ? "identical" : "differ");
  return o;
}

// 9: runtime envelope at 512x512.
Outcome envelope() {
  const testing::SyntheticScene scene = testing::make_scene(7, 512, 512);
  const auto t = Clock::now();
  const ManipulationResult res = run_manipulation(scene.image, scene.region, Mode::kEnhance, {});
  const double secs = seconds_since(t);
  Outcome o;
  o.pass = secs <= kEnvelopeSeconds;
  o.detail = "512x512 enhance took " + fmt(secs, 1) + " s (limit " + fmt(kEnvelopeSeconds, 0) +
             " s), " + std::to_string(res.report.level_widths.size()) + " levels, " +
             to_string(res.report.termination);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: " << argv[0] << " <salmanip-cli> [work-dir]\n";
    return 2;
  }
  const fs::path cli = argv[1];
  const fs::path work = argc > 2 ? fs::path(argv[2])
                                 : fs::temp_directory_path() /
                                       ("salmanip_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(work);

  try {
    print(1, "fixed point under pinned thresholds", fixed_point());
    std::cerr << "running the synthetic suite (" << kSuiteSize << " scenes x 3 targets)\n";
    const auto runs = run_suite();
    print(2, "enhancement efficacy", efficacy(runs));
    print(3, "contrast follows delta-s", monotone(runs));
    print(4, "PatchMatch vs exhaustive search", patchmatch());
    print(5, "screened Poisson", poisson());
    print(6, "metric oracles", metrics());
    print(7, "threshold bookkeeping", bookkeeping(runs));
    print(8, "CLI determinism", determinism(cli, work));
    print(9, "runtime envelope", envelope(), false);
  } catch (const std::exception& e) {
    std::cout << "FAIL  aborted: " << e.what() << std::endl;
    fs::remove_all(work);
    return 2;
  }
  fs::remove_all(work);
  std::cout << (g_hard_failures == 0 ? "all enforced criteria passed"
                                     : std::to_string(g_hard_failures) + " criteria failed")
            << std::endl;
  return g_hard_failures == 0 ? 0 : 1;
}
