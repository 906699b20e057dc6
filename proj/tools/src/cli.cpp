#include "salmanip/tools/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "salmanip/metrics.hpp"
#include "salmanip/pipeline.hpp"
#include "salmanip/png_io.hpp"
#include "salmanip/report_io.hpp"

namespace salmanip::tools {
namespace {

namespace fs = std::filesystem;

struct RunFlags {
  std::string input;
  std::string mask;
  std::string setup_mask;
  std::string output;
  std::string save_saliency;
  std::string report;
  std::string trace_csv;
  bool dry_run = false;
  bool verbose = false;
};

struct SaliencyFlags {
  std::string input;
  std::string output;
};

struct EvalFlags {
  std::string pred_dir;
  std::string gt_dir;
  std::string metric = "cc";
  std::string report;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error("failed writing " + path.string());
}

void add_run_flags(CLI::App& cmd, RunFlags& f, ManipulationConfig& cfg) {
  cmd.add_option("--input", f.input, "Input image (PNG)")->required();
  cmd.add_option("--mask", f.mask, "Region mask (8-bit PNG, >=128 is inside)");
  cmd.add_option("--setup-mask", f.setup_mask,
                 "Ternary setup PNG (0 decrease, 128 keep, 255 increase); overrides the mode");
  cmd.add_option("--output", f.output, "Result image (PNG)");
  cmd.add_option("--save-saliency", f.save_saliency,
                 "Directory for input_saliency.png and output_saliency.png");
  cmd.add_option("--report", f.report, "Run report (JSON)");
  cmd.add_option("--trace-csv", f.trace_csv, "Per-iteration log (CSV)");
  cmd.add_flag("--dry-run", f.dry_run, "Validate inputs and print the resolved configuration");
  cmd.add_flag("-v,--verbose", f.verbose, "Print each coarse iteration to stderr");

  cmd.add_option("--delta-s", cfg.delta_s, "Target saliency contrast in [0,1]")
      ->capture_default_str();
  cmd.add_option("--lambda", cfg.lambda, "Gradient term weight")->capture_default_str();
  cmd.add_option("--eta", cfg.eta, "Threshold step size")->capture_default_str();
  cmd.add_option("--epsilon", cfg.epsilon, "Convergence tolerance on |psi - delta-s|")
      ->capture_default_str();
  cmd.add_option("--beta-top", cfg.beta_top, "Fraction of pixels in the top-mean contrast")
      ->capture_default_str();
  cmd.add_option("--patch-size", cfg.synth.patch_size, "Synthesis patch size (odd)")
      ->capture_default_str();
  cmd.add_option("--saliency-patch", cfg.sal.patch_size, "Saliency patch size (odd)")
      ->capture_default_str();
  cmd.add_option("--coarse-width", cfg.coarse_width, "Width of the coarsest pyramid level")
      ->capture_default_str();
  cmd.add_option("--iters-coarse", cfg.iters_coarse, "Image updates at the coarsest level")
      ->capture_default_str();
  cmd.add_option("--iters-fine", cfg.iters_fine, "Image updates at the finest level")
      ->capture_default_str();
  cmd.add_option("--max-db-iterations", cfg.max_db_iterations,
                 "Cap on database updates at the coarsest level")
      ->capture_default_str();
  cmd.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  cmd.add_flag("--pin-thresholds", cfg.pin_thresholds,
                "Debug: hold tau+ = 0 and tau- = 1 for the whole run");
}

int run_mode(Mode mode, const RunFlags& f, ManipulationConfig cfg, std::ostream& out,
             std::ostream& err) {
  if (!(cfg.delta_s >= 0.0 && cfg.delta_s <= 1.0)) {
    throw InputError("delta-s must be in [0,1]");
  }
  cfg.validate();
  if (f.mask.empty() == f.setup_mask.empty()) {
    throw InputError("exactly one of --mask and --setup-mask is required");
  }
  if (f.output.empty() && !f.dry_run) throw InputError("--output is required");

  const RgbImage img = png::read_rgb(f.input);
  const GrayImage g = png::read_gray(f.setup_mask.empty() ? f.mask : f.setup_mask);
  if (g.width != img.width || g.height != img.height) throw InputError("mask size mismatch");

  std::optional<SetupMask> custom;
  Mask region;
  if (!f.setup_mask.empty()) {
    custom = setup_from_gray(g);
    custom->validate();
  } else {
    region = mask_from_gray(g);
    build_setup(region, mode).validate();
  }

  if (f.dry_run) {
    out << config_to_json(cfg) << '\n';
    return 0;
  }

  RunOptions opts;
  if (f.verbose) {
    opts.on_iteration = [&err](const TraceEntry& e) {
      err << "iter " << e.iteration << " tau+=" << e.tau_plus << " tau-=" << e.tau_minus
          << " psi=" << e.psi << '\n';
    };
  }
  const ManipulationResult res = custom ? run_manipulation(img, *custom, cfg, opts)
                                        : run_manipulation(img, region, mode, cfg, opts);
  png::write_rgb(f.output, res.image);

  if (!f.save_saliency.empty()) {
    const fs::path dir(f.save_saliency);
    fs::create_directories(dir);
    png::write_gray(dir / "input_saliency.png", compute_saliency_file(img, cfg.sal).to_gray());
    png::write_gray(dir / "output_saliency.png",
                    compute_saliency_file(res.image, cfg.sal).to_gray());
  }
  if (!f.report.empty()) write_text(f.report, report_to_json(res.report) + '\n');
  if (!f.trace_csv.empty()) write_text(f.trace_csv, trace_to_csv(res.report));

  out << to_string(res.report.termination) << ": psi " << res.report.initial_psi << " -> "
      << res.report.final_psi << " (" << res.report.trace.size() - 1 << " iterations)\n";
  return 0;
}

int run_saliency(const SaliencyFlags& f, const SaliencyConfig& cfg) {
  cfg.validate();
  png::write_gray(f.output, compute_saliency_file(png::read_rgb(f.input), cfg).to_gray());
  return 0;
}

int run_eval(const EvalFlags& f, std::ostream& out, std::ostream& err) {
  const CorpusReport r = evaluate_corpus(f.pred_dir, f.gt_dir, parse_metric(f.metric));
  for (const auto& w : r.warnings) err << "warning: " << w << '\n';
  if (f.report.empty()) {
    out << r.to_csv();
  } else {
    write_text(f.report, r.to_csv());
  }
  if (r.empty()) {
    err << "no prediction/ground-truth pairs found\n";
    return 1;
  }
  out << "mean " << to_string(parse_metric(f.metric)) << ": " << r.mean() << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Saliency-driven image manipulation"};
  app.name("salmanip");
  app.require_subcommand(1);

  RunFlags run_flags;
  ManipulationConfig cfg;
  std::optional<Mode> mode;
  for (Mode m : {Mode::kEnhance, Mode::kAttenuate, Mode::kDeclutter}) {
    const std::string name = to_string(m);
    CLI::App* cmd = app.add_subcommand(name, "Run the manipulation in " + name + " mode");
    add_run_flags(*cmd, run_flags, cfg);
    cmd->callback([&mode, m] { mode = m; });
  }

  SaliencyFlags sal_flags;
  SaliencyConfig sal_cfg;
  CLI::App* sal = app.add_subcommand("saliency", "Write the saliency map of an image");
  sal->add_option("--input", sal_flags.input, "Input image (PNG)")->required();
  sal->add_option("--output", sal_flags.output, "Saliency map (8-bit PNG)")->required();
  sal->add_option("--saliency-patch", sal_cfg.patch_size, "Saliency patch size (odd)")
      ->capture_default_str();

  EvalFlags eval_flags;
  CLI::App* eval = app.add_subcommand("eval", "Score saliency maps against ground truth");
  eval->add_option("--pred-dir", eval_flags.pred_dir, "Predicted maps")->required();
  eval->add_option("--gt-dir", eval_flags.gt_dir, "Ground-truth masks")->required();
  eval->add_option("--metric", eval_flags.metric, "cc or wfb")
      ->check(CLI::IsMember({"cc", "wfb"}))
      ->capture_default_str();
  eval->add_option("--report", eval_flags.report, "CSV report path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (mode) return run_mode(*mode, run_flags, cfg, out, err);
    if (sal->parsed()) return run_saliency(sal_flags, sal_cfg);
    return run_eval(eval_flags, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace salmanip::tools
