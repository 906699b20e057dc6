#include "salmanip/tools/service.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "salmanip/image_ops.hpp"
#include "salmanip/png_io.hpp"

namespace salmanip::tools {

struct JobService::Job {
  std::string id;
  JobRequest request;
  JobStatus status = JobStatus::kQueued;
  std::vector<TraceEntry> trace;
  std::optional<RunReport> report;
  std::string error;
  std::vector<std::uint8_t> result_png;
  std::vector<std::uint8_t> saliency_in_png;
  std::vector<std::uint8_t> saliency_out_png;
};

std::string to_string(JobStatus s) {
  switch (s) {
    case JobStatus::kQueued:
      return "queued";
    case JobStatus::kRunning:
      return "running";
    case JobStatus::kConverged:
      return "converged";
    case JobStatus::kThresholdStall:
      return "threshold_stall";
    case JobStatus::kIterationCap:
      return "iteration_cap";
    case JobStatus::kFailed:
      return "failed";
  }
  return "unknown";
}

bool is_terminal(JobStatus s) { return s != JobStatus::kQueued && s != JobStatus::kRunning; }

ArtifactKind parse_artifact_kind(const std::string& s) {
  if (s == "result") return ArtifactKind::kResult;
  if (s == "saliency_in") return ArtifactKind::kSaliencyIn;
  if (s == "saliency_out") return ArtifactKind::kSaliencyOut;
  throw InputError("unknown artifact kind");
}

namespace {

JobStatus from_termination(Termination t) {
  switch (t) {
    case Termination::kConverged:
      return JobStatus::kConverged;
    case Termination::kThresholdStall:
      return JobStatus::kThresholdStall;
    case Termination::kIterationCap:
      return JobStatus::kIterationCap;
  }
  return JobStatus::kFailed;
}

nlohmann::json trace_json(const TraceEntry& e) {
  return {{"iter", e.iteration},
          {"psi", e.psi},
          {"tau_plus", e.tau_plus},
          {"tau_minus", e.tau_minus},
          {"e_sal", e.e_sal}};
}

}  // namespace

JobService::JobService(ServiceOptions opts) : opts_(std::move(opts)) {
  if (opts_.max_concurrent_jobs < 1) throw InputError("max_concurrent_jobs must be >= 1");
  opts_.base_config.validate();
  id_salt_ = std::random_device{}();
  id_salt_ = (id_salt_ << 32) ^ std::random_device{}();
  for (int i = 0; i < opts_.max_concurrent_jobs; ++i) {
    workers_.emplace_back([this](std::stop_token st) { worker_loop(st); });
  }
}

JobService::~JobService() {
  for (auto& w : workers_) w.request_stop();
  changed_.notify_all();
  workers_.clear();
}

std::string JobService::next_id() {
  std::ostringstream s;
  s << std::hex << (id_salt_ ^ (0x9e3779b97f4a7c15ULL * ++id_counter_));
  return s.str();
}

std::string JobService::submit(JobRequest req) {
  const ManipulationConfig& cfg = req.config;
  if (!(cfg.delta_s >= 0.0 && cfg.delta_s <= 1.0)) throw InputError("delta_s out of range");
  cfg.validate();
  req.image.validate();
  if (req.setup) {
    if (req.setup->width() != req.image.width || req.setup->height() != req.image.height) {
      throw InputError("mask size mismatch");
    }
    req.setup->validate();
  } else {
    if (req.region.width() != req.image.width || req.region.height() != req.image.height) {
      throw InputError("mask size mismatch");
    }
    build_setup(req.region, req.mode).validate();
  }

  auto job = std::make_shared<Job>();
  job->request = std::move(req);
  std::lock_guard lock(mu_);
  job->id = next_id();
  jobs_.emplace(job->id, job);
  queue_.push_back(job);
  changed_.notify_all();
  return job->id;
}

void JobService::worker_loop(std::stop_token stop) {
  while (true) {
    std::shared_ptr<Job> job;
    {
      std::unique_lock lock(mu_);
      if (!changed_.wait(lock, stop, [this] { return !queue_.empty(); })) return;
      job = queue_.front();
      queue_.pop_front();
      job->status = JobStatus::kRunning;
      start_order_.push_back(job->id);
      peak_running_ = std::max(peak_running_, ++running_);
      changed_.notify_all();
    }
    execute(*job);
    {
      std::lock_guard lock(mu_);
      --running_;
      changed_.notify_all();
    }
  }
}

void JobService::execute(Job& job) {
  const JobRequest& req = job.request;
  RunOptions opts;
  opts.on_iteration = [this, &job](const TraceEntry& e) {
    std::lock_guard lock(mu_);
    job.trace.push_back(e);
    changed_.notify_all();
  };
  try {
    const ManipulationResult res =
        req.setup ? run_manipulation(req.image, *req.setup, req.config, opts)
                  : run_manipulation(req.image, req.region, req.mode, req.config, opts);
    auto result_png = png::encode_rgb(res.image);
    auto sal_in = png::encode_gray(compute_saliency_file(req.image, req.config.sal).to_gray());
    auto sal_out = png::encode_gray(compute_saliency_file(res.image, req.config.sal).to_gray());
    std::lock_guard lock(mu_);
    job.result_png = std::move(result_png);
    job.saliency_in_png = std::move(sal_in);
    job.saliency_out_png = std::move(sal_out);
    job.trace = res.report.trace;
    job.report = res.report;
    job.status = from_termination(res.report.termination);
  } catch (const std::exception& e) {
    std::lock_guard lock(mu_);
    job.error = e.what();
    job.status = JobStatus::kFailed;
  }
  changed_.notify_all();
}

std::optional<JobSnapshot> JobService::status(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) return std::nullopt;
  const Job& j = *it->second;
  JobSnapshot s;
  s.id = j.id;
  s.status = j.status;
  s.mode = j.request.setup ? "custom" : to_string(j.request.mode);
  s.delta_s = j.request.config.delta_s;
  s.trace = j.trace;
  s.report = j.report;
  s.error = j.error;
  return s;
}

ArtifactResponse JobService::artifact(const std::string& id, ArtifactKind kind) const {
  std::lock_guard lock(mu_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) return {404, {}, "unknown job"};
  const Job& j = *it->second;
  if (j.status == JobStatus::kFailed) return {409, {}, "job failed"};
  if (!is_terminal(j.status)) return {409, {}, "job not finished"};
  switch (kind) {
    case ArtifactKind::kResult:
      return {200, j.result_png, {}};
    case ArtifactKind::kSaliencyIn:
      return {200, j.saliency_in_png, {}};
    case ArtifactKind::kSaliencyOut:
      return {200, j.saliency_out_png, {}};
  }
  return {400, {}, "unknown artifact kind"};
}

bool JobService::wait(const std::string& id, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) return false;
  const Job& j = *it->second;
  return changed_.wait_for(lock, timeout, [&j] { return is_terminal(j.status); });
}

std::vector<std::string> JobService::start_order() const {
  std::lock_guard lock(mu_);
  return start_order_;
}

int JobService::peak_running() const {
  std::lock_guard lock(mu_);
  return peak_running_;
}

std::vector<std::uint8_t> preview_saliency(std::span<const std::uint8_t> png_bytes,
                                           int max_width) {
  const RgbImage img = png::decode_rgb(png_bytes);
  LabImage lab = rgb_to_lab(img);
  if (img.width > max_width) {
    const int h = std::max(1, static_cast<int>(std::lround(static_cast<double>(img.height) *
                                                           max_width / img.width)));
    lab = resample_to(lab, max_width, h);
  }
  return png::encode_gray(compute_saliency(lab).to_gray());
}

std::string snapshot_to_json(const JobSnapshot& s) {
  nlohmann::json j;
  j["job_id"] = s.id;
  j["status"] = to_string(s.status);
  j["mode"] = s.mode;
  j["delta_s"] = s.delta_s;
  auto& trace = j["trace"] = nlohmann::json::array();
  for (const auto& e : s.trace) trace.push_back(trace_json(e));
  if (s.report) {
    j["initial_psi"] = s.report->initial_psi;
    j["final_psi"] = s.report->final_psi;
    j["termination"] = to_string(s.report->termination);
    j["notes"] = s.report->notes;
  }
  if (!s.error.empty()) j["error"] = s.error;
  return j.dump();
}

namespace {

void send_error(httplib::Response& res, int status, const std::string& reason) {
  res.status = status;
  res.set_content(nlohmann::json{{"error", reason}}.dump(), "application/json");
}

std::span<const std::uint8_t> as_bytes(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

double parse_number(const std::string& text, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InputError("invalid " + field);
  }
  if (used != text.size()) throw InputError("invalid " + field);
  return v;
}

std::string field(const httplib::Request& req, const std::string& key) {
  if (req.has_file(key)) return req.get_file_value(key).content;
  if (req.has_param(key)) return req.get_param_value(key);
  return {};
}

JobRequest parse_job(const httplib::Request& req, const ManipulationConfig& base) {
  if (!req.is_multipart_form_data()) throw InputError("expected multipart/form-data");
  const std::string image = field(req, "image");
  const std::string mask = field(req, "mask");
  if (image.empty()) throw InputError("missing image");
  if (mask.empty()) throw InputError("missing mask");

  JobRequest job;
  job.config = base;
  try {
    job.image = png::decode_rgb(as_bytes(image));
  } catch (const InputError&) {
    throw InputError("invalid image png");
  }
  GrayImage m;
  try {
    m = png::decode_gray(as_bytes(mask));
  } catch (const InputError&) {
    throw InputError("invalid mask png");
  }
  if (m.width != job.image.width || m.height != job.image.height) {
    throw InputError("mask size mismatch");
  }

  const std::string mode = field(req, "mode");
  if (mode == "custom") {
    job.setup = setup_from_gray(m);
  } else {
    job.mode = mode.empty() ? Mode::kEnhance : parse_mode(mode);
    job.region = mask_from_gray(m);
  }
  if (const auto v = field(req, "delta_s"); !v.empty()) {
    job.config.delta_s = parse_number(v, "delta_s");
    if (!(job.config.delta_s >= 0.0 && job.config.delta_s <= 1.0)) {
      throw InputError("delta_s out of range");
    }
  }
  if (const auto v = field(req, "lambda"); !v.empty()) job.config.lambda = parse_number(v, "lambda");
  if (const auto v = field(req, "seed"); !v.empty()) {
    const double s = parse_number(v, "seed");
    if (s < 0 || s != std::floor(s)) throw InputError("invalid seed");
    job.config.seed = static_cast<std::uint64_t>(s);
  }
  return job;
}

}  // namespace

void install_routes(httplib::Server& server, JobService& service) {
  const ServiceOptions& opts = service.options();

  server.Post("/api/jobs", [&service](const httplib::Request& req, httplib::Response& res) {
    try {
      const std::string id = service.submit(parse_job(req, service.options().base_config));
      res.status = 202;
      res.set_content(nlohmann::json{{"job_id", id}}.dump(), "application/json");
    } catch (const InputError& e) {
      send_error(res, 400, e.what());
    }
  });

  server.Get(R"(/api/jobs/([0-9a-f]+))", [&service](const httplib::Request& req,
                                                     httplib::Response& res) {
    const auto snap = service.status(req.matches[1]);
    if (!snap) return send_error(res, 404, "unknown job");
    res.set_content(snapshot_to_json(*snap), "application/json");
  });

  server.Get(R"(/api/jobs/([0-9a-f]+)/artifact)", [&service](const httplib::Request& req,
                                                             httplib::Response& res) {
    ArtifactKind kind;
    try {
      kind = parse_artifact_kind(req.get_param_value("kind"));
    } catch (const InputError& e) {
      return send_error(res, 400, e.what());
    }
    const ArtifactResponse a = service.artifact(req.matches[1], kind);
    if (a.http_status != 200) return send_error(res, a.http_status, a.error);
    res.set_content(std::string(a.png.begin(), a.png.end()), "image/png");
  });

  server.Post("/api/saliency", [&service](const httplib::Request& req, httplib::Response& res) {
    const std::string image = req.is_multipart_form_data() ? field(req, "image") : req.body;
    if (image.empty()) return send_error(res, 400, "missing image");
    try {
      const auto png = preview_saliency(as_bytes(image), service.options().preview_max_width);
      res.set_content(std::string(png.begin(), png.end()), "image/png");
    } catch (const InputError& e) {
      send_error(res, 400, e.what());
    }
  });

  if (!opts.static_dir.empty()) server.set_mount_point("/", opts.static_dir.string());
}

}  // namespace salmanip::tools
