#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "salmanip/pipeline.hpp"

namespace httplib {
class Server;
}

namespace salmanip::tools {

struct ServiceOptions {
  int max_concurrent_jobs = 2;
  /// Width cap of the synchronous saliency preview.
  int preview_max_width = 400;
  /// Served under / when non-empty.
  std::filesystem::path static_dir;
  /// Starting point for every job; per-job fields override it.
  ManipulationConfig base_config;
};

enum class JobStatus { kQueued, kRunning, kConverged, kThresholdStall, kIterationCap, kFailed };

std::string to_string(JobStatus s);
bool is_terminal(JobStatus s);

enum class ArtifactKind { kResult, kSaliencyIn, kSaliencyOut };

/// Throws InputError for names other than result, saliency_in, saliency_out.
ArtifactKind parse_artifact_kind(const std::string& s);

struct JobRequest {
  RgbImage image;
  /// Either a binary region with `mode`, or a ternary setup.
  Mask region;
  Mode mode = Mode::kEnhance;
  std::optional<SetupMask> setup;
  ManipulationConfig config;
};

struct JobSnapshot {
  std::string id;
  JobStatus status = JobStatus::kQueued;
  std::string mode;
  double delta_s = 0.0;
  std::vector<TraceEntry> trace;
  std::optional<RunReport> report;
  std::string error;
};

struct ArtifactResponse {
  int http_status = 200;
  std::vector<std::uint8_t> png;
  std::string error;
};

/// In-memory job store with a fixed pool of workers draining a FIFO queue.
class JobService {
 public:
  explicit JobService(ServiceOptions opts = {});
  ~JobService();
  JobService(const JobService&) = delete;
  JobService& operator=(const JobService&) = delete;

  /// Validates and queues a job; throws InputError with a client-facing reason.
  std::string submit(JobRequest req);
  std::optional<JobSnapshot> status(const std::string& id) const;
  ArtifactResponse artifact(const std::string& id, ArtifactKind kind) const;

  /// Blocks until the job is terminal or the timeout expires; false on timeout
  /// or unknown id.
  bool wait(const std::string& id, std::chrono::milliseconds timeout) const;

  /// Ids in the order workers picked them up.
  std::vector<std::string> start_order() const;
  /// Largest number of jobs observed running at once.
  int peak_running() const;

  const ServiceOptions& options() const { return opts_; }

 private:
  struct Job;

  void worker_loop(std::stop_token stop);
  void execute(Job& job);
  std::string next_id();

  ServiceOptions opts_;
  mutable std::mutex mu_;
  mutable std::condition_variable_any changed_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::deque<std::shared_ptr<Job>> queue_;
  std::vector<std::string> start_order_;
  int running_ = 0;
  int peak_running_ = 0;
  std::uint64_t id_counter_ = 0;
  std::uint64_t id_salt_ = 0;
  std::vector<std::jthread> workers_;
};

/// Saliency of a PNG at no more than `max_width` pixels wide, as an 8-bit PNG.
std::vector<std::uint8_t> preview_saliency(std::span<const std::uint8_t> png_bytes,
                                           int max_width);

/// JSON body of GET /api/jobs/{id}.
std::string snapshot_to_json(const JobSnapshot& s);

/// Registers the /api routes and, when configured, the static mount.
void install_routes(httplib::Server& server, JobService& service);

}  // namespace salmanip::tools
