#pragma once

#include <string>

#include "salmanip/pipeline.hpp"

namespace salmanip {

/// Pretty-printed JSON of a run report. `include_timing` controls whether
/// wall_time_s is emitted.
std::string report_to_json(const RunReport& report, bool include_timing = true);

/// Per-iteration run log: iteration,tau_plus,tau_minus,psi,e_sal
std::string trace_to_csv(const RunReport& report);

/// Resolved configuration as JSON.
std::string config_to_json(const ManipulationConfig& cfg);

/// One trace entry as a compact JSON object.
std::string trace_entry_to_json(const TraceEntry& e);

}  // namespace salmanip
