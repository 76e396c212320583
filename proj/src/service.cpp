#include "pgc/service.hpp"

#include <fmt/format.h>

#include <mutex>
#include <random>

#include "httplib.h"
#include "json.hpp"
#include "pgc/cage_io.hpp"

namespace pgc {

using nlohmann::json;

struct SessionService::Session {
  std::string id;
  Cage rest;
  int grid_res = 0;
  int target_order = 0;
  Lattice lattice;
  CoordinateField field;
  std::chrono::system_clock::time_point created;

  mutable std::mutex image_mutex;
  std::string image;
  std::string image_type;
};

namespace {

constexpr double kSnapGap = 1e-6;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message, json extra = json::object()) {
  extra["error"] = message;
  send_json(res, status, extra);
}

json violations_json(const ValidationReport& report) {
  json out = json::array();
  for (const auto& v : report.violations)
    out.push_back({{"kind", to_string(v.kind)},
                   {"curve_a", v.curve_a},
                   {"curve_b", v.curve_b},
                   {"location", {v.location.x, v.location.y}},
                   {"magnitude", v.magnitude},
                   {"message", v.message}});
  return out;
}

json triangles_json(const Lattice& lattice) {
  json out = json::array();
  for (const auto& t : lattice.triangles) out.push_back({t[0], t[1], t[2]});
  return out;
}

std::string iso_time(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Curves as either bare point lists or {basis, points} objects.
Cage curves_from_json(const json& curves, Basis basis) {
  if (!curves.is_array()) throw Error(ErrorCode::Parse, "\"curves\" must be an array");
  Cage cage;
  for (const auto& c : curves) cage.curves.push_back(curve_from_json(c, basis));
  return cage;
}

Basis basis_from_json(const json& body) {
  if (!body.contains("basis")) return Basis::Bezier;
  const auto& b = body.at("basis");
  if (b == "bezier") return Basis::Bezier;
  if (b == "monomial") return Basis::Monomial;
  throw Error(ErrorCode::Parse, "basis must be \"bezier\" or \"monomial\"");
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

SessionService::SessionService(ServiceOptions options)
    : options_(std::move(options)), id_state_(std::random_device{}() ^ (std::uint64_t(std::random_device{}()) << 32)) {
  if (!options_.snapshot_dir.empty()) std::filesystem::create_directories(options_.snapshot_dir);
}

SessionService::~SessionService() = default;

std::size_t SessionService::session_count() const {
  std::shared_lock lock(mutex_);
  return sessions_.size();
}

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::string SessionService::new_id() {
  // splitmix64 over a random seed; called with the table lock held.
  auto next = [this] {
    std::uint64_t z = (id_state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  return fmt::format("{:016x}{:016x}", next(), next());
}

void SessionService::mount(httplib::Server& server) {
  server.set_default_headers({{"Access-Control-Allow-Origin", options_.cors_origin},
                              {"Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      send_error(res, e.code() == ErrorCode::Io ? 500 : 400, e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  });

  server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    if (!body.is_object() || !body.contains("cage")) return send_error(res, 400, "request needs a \"cage\"");
    const int grid_res = body.value("grid_res", 64);
    const int target_order = body.value("target_order", 3);
    if (grid_res < options_.min_grid_res || grid_res > options_.max_grid_res)
      return send_error(res, 422, fmt::format("grid_res must lie in [{}, {}]", options_.min_grid_res,
                                              options_.max_grid_res));
    if (target_order < 1 || target_order > options_.max_target_order)
      return send_error(res, 422, fmt::format("target_order must lie in [1, {}]", options_.max_target_order));

    Cage cage = cage_from_json(body.at("cage"));
    snap_joints(cage, kSnapGap);
    const auto report = validate_cage(cage);
    if (!report.ok())
      return send_error(res, 400, "invalid cage", {{"violations", violations_json(report)}});

    auto session = std::make_shared<Session>();
    session->rest = cage;
    session->grid_res = grid_res;
    session->target_order = target_order;
    session->created = std::chrono::system_clock::now();
    session->lattice = make_lattice(cage, grid_res);
    FieldOptions fo;
    fo.threads = options_.encode_threads;
    session->field = build_field(cage, session->lattice.points, target_order, fo);
    {
      std::unique_lock lock(mutex_);
      do session->id = new_id();
      while (sessions_.count(session->id));
      sessions_.emplace(session->id, session);
    }
    if (!options_.snapshot_dir.empty()) {
      save_field(options_.snapshot_dir / (session->id + ".field"), session->field);
      save_cage(options_.snapshot_dir / (session->id + ".cage.json"), cage);
    }
    send_json(res, 201,
              {{"id", session->id},
               {"grid_res", grid_res},
               {"target_order", target_order},
               {"rest_grid", points_to_json(session->lattice.points)},
               {"triangles", triangles_json(session->lattice)}});
  });

  server.Put(R"(/sessions/([^/]+)/cage)", [this](const httplib::Request& req, httplib::Response& res) {
    const auto session = find(req.matches[1]);
    if (!session) return send_error(res, 404, "unknown session");
    const json body = parse_body(req);
    if (!body.is_object() || !body.contains("curves")) return send_error(res, 400, "request needs \"curves\"");
    const Cage deformed = curves_from_json(body.at("curves"), basis_from_json(body));
    if (deformed.size() != session->rest.size())
      return send_error(res, 409, fmt::format("expected {} curves, got {}", session->rest.size(), deformed.size()));
    for (std::size_t k = 0; k < deformed.size(); ++k)
      if (deformed[k].order() != session->target_order)
        return send_error(res, 409, fmt::format("curve {} has order {}, session target order is {}", k,
                                                deformed[k].order(), session->target_order));
    const auto out = deform(session->field, make_deformed(deformed, session->target_order));
    send_json(res, 200, {{"deformed_grid", points_to_json(out)}});
  });

  server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const auto session = find(req.matches[1]);
    if (!session) return send_error(res, 404, "unknown session");
    bool has_image;
    {
      std::lock_guard lock(session->image_mutex);
      has_image = !session->image.empty();
    }
    send_json(res, 200,
              {{"id", session->id},
               {"grid_res", session->grid_res},
               {"target_order", session->target_order},
               {"curve_count", session->rest.size()},
               {"point_count", session->lattice.points.size()},
               {"triangle_count", session->lattice.triangles.size()},
               {"created_at", iso_time(session->created)},
               {"has_image", has_image},
               {"cage", cage_to_json(session->rest)}});
  });

  server.Delete(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::unique_lock lock(mutex_);
    sessions_.erase(req.matches[1]);
    res.status = 204;
  });

  server.Post(R"(/sessions/([^/]+)/image)", [this](const httplib::Request& req, httplib::Response& res) {
    const auto session = find(req.matches[1]);
    if (!session) return send_error(res, 404, "unknown session");
    if (!req.is_multipart_form_data() || req.files.empty())
      return send_error(res, 400, "expected a multipart upload with one file");
    const auto& file = req.files.count("image") ? req.files.find("image")->second : req.files.begin()->second;
    {
      std::lock_guard lock(session->image_mutex);
      session->image = file.content;
      session->image_type = file.content_type.empty() ? "application/octet-stream" : file.content_type;
    }
    send_json(res, 201, {{"size", file.content.size()}, {"content_type", session->image_type}});
  });

  server.Get(R"(/sessions/([^/]+)/image)", [this](const httplib::Request& req, httplib::Response& res) {
    const auto session = find(req.matches[1]);
    if (!session) return send_error(res, 404, "unknown session");
    std::lock_guard lock(session->image_mutex);
    if (session->image.empty()) return send_error(res, 404, "session has no image");
    res.set_content(session->image, session->image_type);
  });
}

}  // namespace pgc
