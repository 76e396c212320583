#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "pgc/deformer.hpp"

namespace httplib {
class Server;
}

namespace pgc {

struct ServiceOptions {
  /// Value of Access-Control-Allow-Origin on every response.
  std::string cors_origin = "*";
  /// When set, each new session's field and rest cage are written here.
  std::filesystem::path snapshot_dir;
  /// Threads used to encode a session grid; 0 picks the hardware concurrency.
  unsigned encode_threads = 0;
  int min_grid_res = 8;
  int max_grid_res = 512;
  int max_target_order = 8;
};

/// Precompute-once, deform-many sessions over HTTP/JSON.
///
///   POST   /sessions              {cage, grid_res, target_order}
///   PUT    /sessions/{id}/cage    {curves, basis}
///   GET    /sessions/{id}
///   DELETE /sessions/{id}
///   POST   /sessions/{id}/image   multipart upload
///   GET    /sessions/{id}/image
///
/// Sessions are immutable once created apart from the attached image; PUT
/// only reads the stored field.
class SessionService {
 public:
  struct Session;

  explicit SessionService(ServiceOptions options = {});
  ~SessionService();

  /// Registers the routes and CORS handling on server.
  void mount(httplib::Server& server);

  std::size_t session_count() const;

 private:
  std::shared_ptr<Session> find(const std::string& id) const;
  std::string new_id();

  ServiceOptions options_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t id_state_;
};

}  // namespace pgc
