#pragma once

#include <filesystem>
#include <vector>

#include "json.hpp"
#include "pgc/geometry.hpp"

namespace pgc {

enum class Basis { Bezier, Monomial };

// Cage JSON: { "curves": [ { "basis": "bezier" | "monomial",
//                            "points": [[x, y], ...] }, ... ] }
// Curve order is points.length - 1; curves are listed in CCW order.
Cage cage_from_json(const nlohmann::json& j);
nlohmann::json cage_to_json(const Cage& cage, Basis basis = Basis::Bezier);

Curve curve_from_json(const nlohmann::json& j, Basis default_basis = Basis::Bezier);

std::vector<Vec2> points_from_json(const nlohmann::json& j);
nlohmann::json points_to_json(std::span<const Vec2> points);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

inline Cage load_cage(const std::filesystem::path& path) { return cage_from_json(read_json_file(path)); }
void save_cage(const std::filesystem::path& path, const Cage& cage, Basis basis = Basis::Bezier);

inline std::vector<Vec2> load_points(const std::filesystem::path& path) {
  return points_from_json(read_json_file(path));
}

}  // namespace pgc
