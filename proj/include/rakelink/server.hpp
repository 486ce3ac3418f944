#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>

namespace rakelink {

struct ServerConfig {
  std::filesystem::path data_dir = "rakelink-data";
  std::string host = "127.0.0.1";
  /// Optional directory of static UI assets served under `/`.
  std::filesystem::path static_dir;
  /// Sweeps that may run at the same time; further requests queue as `pending`.
  std::size_t max_running_sweeps = 1;
  /// Solver threads per sweep (0 = hardware concurrency).
  std::size_t sweep_jobs = 0;
};

/**
 * @brief HTTP audit service.
 *
 * Datasets and sweeps are content addressed and persisted under
 * `data_dir`; unfinished sweeps found there at construction are queued
 * again and resume from their manifest prefix. There is no authentication.
 */
class AuditServer {
 public:
  explicit AuditServer(ServerConfig config);
  ~AuditServer();
  AuditServer(const AuditServer&) = delete;
  AuditServer& operator=(const AuditServer&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port; returns the bound port or -1.
  int start(int port);
  /// Binds and serves on the calling thread until stop(). Returns false if binding failed.
  bool run(int port);
  void stop();

  /// Blocks until no sweep is queued or running.
  void wait_idle();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rakelink
