#include "pgc/cage_io.hpp"

#include <fstream>
#include <sstream>

#include "pgc/error.hpp"

namespace pgc {

namespace {

Vec2 point_from_json(const nlohmann::json& p) {
  if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
    throw Error(ErrorCode::Parse, "expected a point [x, y], got " + p.dump());
  Vec2 v{p[0].get<double>(), p[1].get<double>()};
  if (!v.finite()) throw Error(ErrorCode::Parse, "non-finite point " + p.dump());
  return v;
}

}  // namespace

std::vector<Vec2> points_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::Parse, "expected a list of points [[x, y], ...]");
  std::vector<Vec2> pts;
  pts.reserve(j.size());
  for (const auto& p : j) pts.push_back(point_from_json(p));
  return pts;
}

nlohmann::json points_to_json(std::span<const Vec2> points) {
  auto out = nlohmann::json::array();
  for (const auto& p : points) out.push_back({p.x, p.y});
  return out;
}

Curve curve_from_json(const nlohmann::json& j, Basis default_basis) {
  Basis basis = default_basis;
  const nlohmann::json* pts = &j;
  if (j.is_object()) {
    if (j.contains("basis")) {
      const auto& b = j.at("basis");
      if (b == "bezier") basis = Basis::Bezier;
      else if (b == "monomial") basis = Basis::Monomial;
      else throw Error(ErrorCode::Parse, "unknown basis " + b.dump());
    }
    if (!j.contains("points")) throw Error(ErrorCode::Parse, "curve object without \"points\"");
    pts = &j.at("points");
  }
  auto points = points_from_json(*pts);
  if (points.size() < 2) throw Error(ErrorCode::Parse, "a curve needs at least two points");
  return basis == Basis::Bezier ? bezier_to_monomial(points) : Curve(std::move(points));
}

Cage cage_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("curves") || !j.at("curves").is_array())
    throw Error(ErrorCode::Parse, "cage JSON must be an object with a \"curves\" array");
  Cage cage;
  for (const auto& c : j.at("curves")) {
    if (!c.is_object()) throw Error(ErrorCode::Parse, "each curve must be an object");
    cage.curves.push_back(curve_from_json(c));
  }
  return cage;
}

nlohmann::json cage_to_json(const Cage& cage, Basis basis) {
  auto curves = nlohmann::json::array();
  for (const auto& c : cage.curves) {
    const auto pts = basis == Basis::Bezier ? monomial_to_bezier(c) : c.coefficients();
    curves.push_back({{"basis", basis == Basis::Bezier ? "bezier" : "monomial"},
                      {"points", points_to_json(pts)}});
  }
  return {{"curves", curves}};
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

void save_cage(const std::filesystem::path& path, const Cage& cage, Basis basis) {
  write_text_file(path, cage_to_json(cage, basis).dump(2) + "\n");
}

}  // namespace pgc
