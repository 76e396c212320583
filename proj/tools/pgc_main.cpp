// Command-line front end: encode, deform, warp, field, check.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <iostream>
#include <limits>

#include "CLI11.hpp"
#include "pgc/cage_io.hpp"
#include "pgc/check.hpp"
#include "pgc/deformer.hpp"
#include "pgc/image.hpp"

using namespace pgc;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kInvalidInput = 2, kIoFailure = 3 };

constexpr double kSnapGap = 1e-6;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Loads a cage, closing joint gaps below kSnapGap and refusing anything else
// that fails validation.
Cage load_valid_cage(const std::string& path) {
  Cage cage = load_cage(path);
  for (std::size_t k : snap_joints(cage, kSnapGap))
    spdlog::warn("{}: snapped joint after curve {} (gap below {:g})", path, k, kSnapGap);
  const auto report = validate_cage(cage);
  if (!report.ok()) throw InputError(path + ": invalid cage\n" + report.describe());
  return cage;
}

int cmd_encode(const std::string& cage_path, const std::string& points_path, int target_order,
               const std::string& out_path) {
  const Cage cage = load_valid_cage(cage_path);
  const auto points = load_points(points_path);
  const auto filter = filter_interior(cage, points);
  for (std::size_t i : filter.rejected)
    spdlog::warn("point {} ({:g}, {:g}) is outside the cage or on its boundary; excluded", i, points[i].x,
                 points[i].y);
  const auto field = build_field(cage, filter.kept, target_order);
  save_field(out_path, field);
  spdlog::info("encoded {} point(s) against {} curve(s), target order {}", field.size(), field.curve_count(),
               target_order);
  if (!filter.rejected.empty()) std::cerr << "warning: " << filter.rejected.size() << " point(s) excluded\n";
  return kOk;
}

int cmd_deform(const std::string& coords_path, const std::string& deformed_path, const std::string& rest_path,
               const std::string& out_path) {
  const auto field = load_field(coords_path);
  Cage deformed = load_cage(deformed_path);
  for (std::size_t k : snap_joints(deformed, kSnapGap))
    spdlog::warn("{}: snapped joint after curve {}", deformed_path, k);
  if (!rest_path.empty() && cage_hash(load_cage(rest_path)) != field.cage_hash())
    throw InputError("field signature does not match the rest cage " + rest_path);
  if (deformed.size() != field.curve_count())
    throw InputError("deformed cage has " + std::to_string(deformed.size()) + " curves; the field expects " +
                     std::to_string(field.curve_count()));
  for (std::size_t k = 0; k < deformed.size(); ++k)
    if (deformed[k].order() > field.target_order())
      throw InputError("deformed curve " + std::to_string(k) + " has order " + std::to_string(deformed[k].order()) +
                       "; expected target order n_t = " + std::to_string(field.target_order()));
  const auto out = deform(field, make_deformed(deformed, field.target_order()));
  write_text_file(out_path, points_to_json(out).dump() + "\n");
  return kOk;
}

int cmd_warp(const std::string& cage_path, const std::string& deformed_path, const std::string& image_path,
             int resolution, int target_order, const std::string& out_path) {
  const Cage cage = load_valid_cage(cage_path);
  const Cage deformed = load_valid_cage(deformed_path);
  const Image source = read_png(image_path);
  if (target_order == 0) target_order = std::max(cage.max_order(), deformed.max_order());
  if (deformed.max_order() > target_order)
    throw InputError("deformed cage order exceeds the target order " + std::to_string(target_order));
  const auto warp = warp_grid(cage, deformed, resolution, target_order);
  for (const auto& p : warp.deformed)
    if (!p.finite()) throw InputError("deformation produced non-finite positions");
  write_png(out_path, render_warp(source, warp.lattice, warp.deformed, source.width, source.height));
  spdlog::info("warped {} lattice points, {} triangles", warp.lattice.points.size(), warp.lattice.triangles.size());
  return kOk;
}

int cmd_field(const std::string& cage_path, const std::string& which, int curve, int coeff, int resolution,
              const std::string& out_path) {
  const Cage cage = load_valid_cage(cage_path);
  if (curve < 0 || static_cast<std::size_t>(curve) >= cage.size())
    throw InputError("curve index " + std::to_string(curve) + " out of range [0, " + std::to_string(cage.size()) + ")");
  const int target_order = std::max(coeff, 1);
  const auto lattice = make_lattice(cage, resolution);
  const auto field = build_field(cage, lattice.points, target_order);
  std::vector<double> values(static_cast<std::size_t>(resolution) * resolution,
                             std::numeric_limits<double>::quiet_NaN());
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t p = 0; p < lattice.points.size(); ++p) {
    const auto row = which == "phi" ? field.phi(p, static_cast<std::size_t>(curve))
                                    : field.psi(p, static_cast<std::size_t>(curve));
    const double v = row[static_cast<std::size_t>(coeff)];
    values[static_cast<std::size_t>(lattice.cells[p][1]) * resolution + lattice.cells[p][0]] = v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  write_png(out_path, render_heatmap(values, resolution));
  std::cout << "min " << lo << " max " << hi << "\n";
  return kOk;
}

int cmd_check(const std::string& cage_path, int samples, std::uint64_t seed, bool corrupt_alpha,
              const std::string& replay_path) {
  const Cage cage = load_valid_cage(cage_path);
  CheckOptions options;
  options.samples = samples;
  options.seed = seed;
  options.corrupt_alpha = corrupt_alpha;
  const auto report = run_checks(cage, options);
  std::cout << report.table();
  if (report.passed()) return kOk;
  nlohmann::json worst = nlohmann::json::array();
  for (const auto& r : report.rows)
    if (!r.passed()) worst.push_back({{"check", r.name}, {"configuration", r.worst}});
  if (replay_path.empty()) {
    std::cerr << worst.dump(2) << "\n";
  } else {
    write_text_file(replay_path, worst.dump(2) + "\n");
    std::cerr << "worst configurations written to " << replay_path << "\n";
  }
  return kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("pgc"));
  spdlog::set_pattern("%l: %v");

  CLI::App app{"Polynomial Green coordinates for high-order cages"};
  app.require_subcommand(1);
  std::string cage, points, out, coords, deformed, rest, image, which, replay;
  int target_order = 3, resolution = 64, curve = 0, coeff = 0, samples = 50;
  std::uint64_t seed = 1;
  bool corrupt_alpha = false;

  auto* encode = app.add_subcommand("encode", "Encode interior points against a rest cage");
  encode->add_option("--cage", cage, "Rest cage JSON")->required();
  encode->add_option("--points", points, "Points JSON [[x, y], ...]")->required();
  encode->add_option("--target-order", target_order, "Order of the deformed curves")->check(CLI::Range(1, 8));
  encode->add_option("--out", out, "Output field file")->required();

  auto* deform_cmd = app.add_subcommand("deform", "Apply a deformed cage to an encoded field");
  deform_cmd->add_option("--coords", coords, "Field file from encode")->required();
  deform_cmd->add_option("--deformed", deformed, "Deformed cage JSON")->required();
  deform_cmd->add_option("--cage", rest, "Rest cage JSON, to verify the field signature");
  deform_cmd->add_option("--out", out, "Output points JSON")->required();

  auto* warp = app.add_subcommand("warp", "Warp a PNG image with a cage deformation");
  int warp_order = 0;
  warp->add_option("--cage", cage, "Rest cage JSON (pixel units, y up)")->required();
  warp->add_option("--deformed", deformed, "Deformed cage JSON")->required();
  warp->add_option("--image", image, "Input PNG")->required();
  warp->add_option("--res", resolution, "Lattice resolution")->check(CLI::Range(2, 4096));
  warp->add_option("--target-order", warp_order, "Target order (default: highest cage order)")
      ->check(CLI::Range(1, 8));
  warp->add_option("--out", out, "Output PNG")->required();

  auto* field = app.add_subcommand("field", "Render one coordinate function as a heatmap");
  int field_res = 128;
  field->add_option("--cage", cage, "Cage JSON")->required();
  field->add_option("--which", which, "phi or psi")->required()->check(CLI::IsMember({"phi", "psi"}));
  field->add_option("--curve", curve, "Curve index")->required();
  field->add_option("--coeff", coeff, "Monomial coefficient index m")->required()->check(CLI::Range(0, 8));
  field->add_option("--res", field_res, "Sampling resolution")->check(CLI::Range(2, 4096));
  field->add_option("--out", out, "Output PNG")->required();

  auto* check = app.add_subcommand("check", "Compare the closed forms against quadrature");
  check->add_option("--cage", cage, "Cage JSON")->required();
  check->add_option("--samples", samples, "Random interior points")->check(CLI::Range(1, 100000));
  check->add_option("--seed", seed, "Random seed");
  check->add_option("--replay", replay, "Write the worst failing configurations here");
  check->add_flag("--corrupt-alpha", corrupt_alpha, "Negative control: perturb alpha before assembly")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    if (*encode) return cmd_encode(cage, points, target_order, out);
    if (*deform_cmd) return cmd_deform(coords, deformed, rest, out);
    if (*warp) return cmd_warp(cage, deformed, image, resolution, warp_order, out);
    if (*field) return cmd_field(cage, which, curve, coeff, field_res, out);
    if (*check) return cmd_check(cage, samples, seed, corrupt_alpha, replay);
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return kInvalidInput;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return e.code() == ErrorCode::Io ? kIoFailure : kInvalidInput;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kInvalidInput;
  }
  return kInvalidInput;
}
