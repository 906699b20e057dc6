#include "salmanip/report_io.hpp"

#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace salmanip {
namespace {

nlohmann::json entry_json(const TraceEntry& e) {
  return {{"iter", e.iteration},
          {"tau_plus", e.tau_plus},
          {"tau_minus", e.tau_minus},
          {"psi", e.psi},
          {"e_sal", e.e_sal}};
}

}  // namespace

std::string report_to_json(const RunReport& report, bool include_timing) {
  nlohmann::json j;
  j["termination"] = to_string(report.termination);
  j["initial_psi"] = report.initial_psi;
  j["final_psi"] = report.final_psi;
  j["final_thresholds"] = {{"tau_plus", report.final_thresholds.tau_plus},
                           {"tau_minus", report.final_thresholds.tau_minus}};
  j["level_widths"] = report.level_widths;
  j["level_iterations"] = report.level_iterations;
  j["keep_deviation"] = report.keep_deviation;
  j["edit_deviation"] = report.edit_deviation;
  j["notes"] = report.notes;
  auto& trace = j["trace"] = nlohmann::json::array();
  for (const auto& e : report.trace) trace.push_back(entry_json(e));
  if (include_timing) j["wall_time_s"] = report.wall_time_s;
  return j.dump(2);
}

std::string trace_to_csv(const RunReport& report) {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "iteration,tau_plus,tau_minus,psi,e_sal\n";
  for (const auto& e : report.trace) {
    out << e.iteration << ',' << e.tau_plus << ',' << e.tau_minus << ',' << e.psi << ','
        << e.e_sal << '\n';
  }
  return out.str();
}

std::string config_to_json(const ManipulationConfig& cfg) {
  nlohmann::json j;
  j["delta_s"] = cfg.delta_s;
  j["lambda"] = cfg.lambda;
  j["eta"] = cfg.eta;
  j["epsilon"] = cfg.epsilon;
  j["beta_top"] = cfg.beta_top;
  j["patch_size"] = cfg.synth.patch_size;
  j["pm_iterations"] = cfg.synth.pm_iterations;
  j["random_search_decay"] = cfg.synth.random_search_decay;
  j["saliency_patch"] = cfg.sal.patch_size;
  j["pca_variance"] = cfg.sal.pca_variance;
  j["coarse_width"] = cfg.coarse_width;
  j["iters_coarse"] = cfg.iters_coarse;
  j["iters_fine"] = cfg.iters_fine;
  j["seed"] = cfg.seed;
  j["stall_tol"] = cfg.stall_tol;
  j["min_db_fraction"] = cfg.min_db_fraction;
  j["max_db_iterations"] = cfg.max_db_iterations;
  j["poisson_tol"] = cfg.poisson_tol;
  j["pin_thresholds"] = cfg.pin_thresholds;
  return j.dump(2);
}

std::string trace_entry_to_json(const TraceEntry& e) { return entry_json(e).dump(); }

}  // namespace salmanip
