#include "pgc/check.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "pgc/cage_io.hpp"
#include "pgc/coords.hpp"
#include "pgc/deformer.hpp"
#include "pgc/kernel.hpp"
#include "pgc/oracle.hpp"

namespace pgc {

namespace {

std::vector<Vec2> sample_interior(const Cage& cage, std::mt19937_64& rng, int count) {
  const auto box = bounding_box(cage);
  const double diam = diameter(cage);
  std::uniform_real_distribution<double> ux(box.min.x, box.max.x), uy(box.min.y, box.max.y);
  const auto coarse = cage.sample_boundary(64);
  const auto dense = cage.sample_boundary(256);
  std::vector<Vec2> pts;
  // Prefer points well away from the boundary; relax if the cage is thin.
  for (double margin : {0.05, 0.02, 0.005}) {
    for (int attempt = 0; attempt < 200 * count && static_cast<int>(pts.size()) < count; ++attempt) {
      const Vec2 p{ux(rng), uy(rng)};
      if (winding_number(coarse, p) == 1 && distance_to_polyline(dense, p) > margin * diam) pts.push_back(p);
    }
    if (static_cast<int>(pts.size()) == count) break;
  }
  return pts;
}

CheckRow make_row(std::string name, double tolerance) {
  CheckRow row;
  row.name = std::move(name);
  row.tolerance = tolerance;
  return row;
}

// NaN counts as an infinite error so that it cannot hide behind comparisons.
void record(CheckRow& row, double error, const nlohmann::json& config) {
  ++row.cases;
  if (std::isnan(error)) error = INFINITY;
  if (row.worst.is_null() || error > row.max_error) {
    row.max_error = error;
    row.worst = config;
    row.worst["error"] = std::isinf(error) ? nlohmann::json("inf") : nlohmann::json(error);
  }
}

nlohmann::json vec_json(const Vec2& v) { return nlohmann::json::array({v.x, v.y}); }

CurveCoords assemble(const Curve& input, const Vec2& eta, int target_order, bool corrupt) {
  const Curve curve = input.normalized();
  const int n = curve.order();
  auto ab = alpha_beta(curve, eta);
  if (corrupt) ab.alpha.back() += 0.1 * (1.0 + std::abs(ab.alpha.back()));
  const auto f = f_kernel(curve, eta, kernel_length(n, target_order) - 1);
  return assemble_coords(ab, f, log_distance_term(curve, eta), n, target_order);
}

}  // namespace

bool CheckReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.passed(); });
}

std::string CheckReport::table() const {
  std::string out = fmt::format("{:<14} {:>8} {:>12} {:>10}  {}\n", "check", "cases", "max error", "tolerance", "result");
  for (const auto& r : rows)
    out += fmt::format("{:<14} {:>8} {:>12.3e} {:>10.0e}  {}\n", r.name, r.cases, r.max_error, r.tolerance,
                       r.passed() ? "pass" : "FAIL");
  return out;
}

CheckReport run_checks(const Cage& cage, const CheckOptions& options) {
  std::mt19937_64 rng(options.seed);
  const auto points = sample_interior(cage, rng, options.samples);
  const int nt = options.target_order;

  CheckRow kernel = make_row("kernel", 1e-8);
  CheckRow dirichlet = make_row("dirichlet", 1e-7);
  CheckRow neumann = make_row("neumann", 1e-7);
  CheckRow reproduction = make_row("reproduction", 1e-6);

  // A bounded random deformation of the cage, at the target order.
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  const double diam = diameter(cage);
  Cage target;
  std::vector<Vec2> joint;
  for (std::size_t k = 0; k < cage.size(); ++k) joint.push_back(Vec2{jitter(rng), jitter(rng)} * diam);
  for (std::size_t k = 0; k < cage.size(); ++k) {
    auto b = monomial_to_bezier(elevate_degree(cage[k], std::max(nt, cage[k].order())));
    b.front() += joint[k];
    b.back() += joint[(k + 1) % cage.size()];
    for (std::size_t j = 1; j + 1 < b.size(); ++j) b[j] += Vec2{jitter(rng), jitter(rng)} * diam;
    target.curves.push_back(bezier_to_monomial(b));
  }

  for (const Vec2& eta : points) {
    Vec2 identity, neumann_closed, neumann_quad;
    for (std::size_t k = 0; k < cage.size(); ++k) {
      const Curve& curve = cage[k];
      const int ns = curve.normalized().order();
      nlohmann::json config{{"curve_index", k},
                            {"curve", cage_to_json(Cage{{curve}}, Basis::Monomial)["curves"][0]},
                            {"eta", vec_json(eta)}};

      const int m_max = kernel_length(ns, nt) - 1;
      const auto f = f_kernel(curve, eta, m_max);
      for (int m = 0; m <= m_max; ++m) {
        const double ref = quad_f_kernel(curve, eta, m).value;
        auto c = config;
        c["m"] = m;
        c["value"] = f[static_cast<std::size_t>(m)];
        c["reference"] = ref;
        record(kernel, std::abs(f[static_cast<std::size_t>(m)] - ref) / std::abs(ref), c);
      }

      const auto cc = assemble(curve, eta, nt, options.corrupt_alpha);
      const Curve& tk = target[k];
      Vec2 dir;
      for (std::size_t m = 0; m < cc.phi.size(); ++m) dir += cc.phi[m] * tk[m];
      const Vec2 dir_ref = quad_dirichlet(curve, tk, eta).value;
      {
        auto c = config;
        c["target_curve"] = cage_to_json(Cage{{tk}}, Basis::Monomial)["curves"][0];
        c["value"] = vec_json(dir);
        c["reference"] = vec_json(dir_ref);
        record(dirichlet, distance(dir, dir_ref) / std::max(1.0, dir_ref.norm()), c);
      }
      for (std::size_t m = 0; m < cc.psi.size(); ++m) neumann_closed += cc.psi[m] * perp(tk[m]);
      neumann_quad += quad_neumann(curve, tk, eta).value;

      const auto id = assemble(curve, eta, std::max(nt, ns), options.corrupt_alpha);
      identity += apply_coords(id, curve);
    }
    nlohmann::json config{{"eta", vec_json(eta)}, {"cage", cage_to_json(cage)}};
    {
      auto c = config;
      c["value"] = vec_json(neumann_closed);
      c["reference"] = vec_json(neumann_quad);
      record(neumann, distance(neumann_closed, neumann_quad) / std::max(1.0, neumann_quad.norm()), c);
    }
    config["value"] = vec_json(identity);
    record(reproduction, distance(identity, eta) / std::max(1.0, diam), config);
  }

  CheckReport report;
  report.rows = {kernel, dirichlet, neumann, reproduction};
  return report;
}

}  // namespace pgc
