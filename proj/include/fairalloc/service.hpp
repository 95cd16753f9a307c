#pragma once

#include <cstddef>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "fairalloc/json_io.hpp"
#include "fairalloc/policies.hpp"

namespace fairalloc {

/// Failure carrying the HTTP status and the {error, detail} body.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string error, json detail = nullptr)
      : std::runtime_error(error), status_(status), detail_(std::move(detail)) {}

  int status() const { return status_; }
  json body() const { return {{"error", what()}, {"detail", detail_}}; }

 private:
  int status_;
  json detail_;
};

/// In-memory sessions for live sequential allocation. Each session runs one
/// chosen policy; other online policies are evaluated on the same state as
/// what-ifs without committing. Calls on different sessions run concurrently,
/// calls on one session are serialized. The least recently used session is
/// dropped once `capacity` is exceeded.
class SessionManager {
 public:
  explicit SessionManager(std::size_t capacity = 256);
  ~SessionManager();

  /// Body: an instance (json_io format) plus optional "policy" (default
  /// hope_online) and "whatif_policies".
  json create(const json& body);
  json get(const std::string& id);
  void remove(const std::string& id);
  /// Body: {"type": theta}. Commits the chosen policy's allocation.
  json observe(const std::string& id, const json& body);
  /// Same what-if block as observe, no state change.
  json whatif(const std::string& id, const json& body);

  std::size_t size() const;

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id);

  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<std::string> order_;  // most recent first
  std::unordered_map<std::string, std::pair<std::shared_ptr<Session>, std::list<std::string>::iterator>> sessions_;
};

/// HTTP front end:
///   POST   /sessions
///   GET    /sessions/{id}
///   DELETE /sessions/{id}
///   POST   /sessions/{id}/observe
///   POST   /sessions/{id}/whatif
/// plus static files from an optional directory.
class HttpService {
 public:
  explicit HttpService(SessionManager& sessions);
  ~HttpService();

  /// False when the directory does not exist.
  bool mount_static(const std::string& directory);
  /// Port 0 picks a free port. Returns the bound port, or nullopt on failure.
  std::optional<int> bind(const std::string& host, int port);
  /// Blocks until stop().
  bool run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fairalloc
