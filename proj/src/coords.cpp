#include "pgc/coords.hpp"

#include <cmath>
#include <numbers>

#include "pgc/error.hpp"

namespace pgc {

AlphaBeta alpha_beta(const Curve& curve, const Vec2& eta) {
  const int n = curve.order();
  const auto size = static_cast<std::size_t>(2 * n);
  std::vector<double> a(size, 0.0);
  std::vector<double> b(size, 0.0);
  // (c(t) - eta) has coefficients d_0 = c_0 - eta, d_i = c_i; c'(t) has
  // coefficients (j + 1) c_{j+1}.
  for (int i = 0; i <= n; ++i) {
    const Vec2 d = i == 0 ? curve[0] - eta : curve[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      const Vec2 dc = curve[static_cast<std::size_t>(j + 1)] * static_cast<double>(j + 1);
      const auto k = static_cast<std::size_t>(i + j);
      a[k] += cross(d, dc);
      b[k] += dot(d, dc);
    }
  }
  // The t^(2n-1) term of alpha is c_n x n c_n = 0.
  a.pop_back();
  return {std::move(a), std::move(b)};
}

double log_distance_term(const Curve& curve, const Vec2& eta) {
  const double d = distance(curve.end(), eta);
  if (!(d > 1e-12)) throw Error(ErrorCode::EndpointSingularity, "query point at curve end point");
  return -std::log(d) / (2.0 * std::numbers::pi);
}

CurveCoords assemble_coords(const AlphaBeta& ab, std::span<const double> kernel, double delta,
                            int source_order, int target_order) {
  if (target_order < 0) throw Error(ErrorCode::InvalidArgument, "target order must be >= 0");
  if (static_cast<int>(kernel.size()) < kernel_length(source_order, target_order))
    throw Error(ErrorCode::InvalidArgument, "kernel sequence too short for the requested order");
  if (ab.alpha.size() != static_cast<std::size_t>(2 * source_order - 1) ||
      ab.beta.size() != static_cast<std::size_t>(2 * source_order))
    throw Error(ErrorCode::InvalidArgument, "alpha/beta sizes do not match the source order");

  CurveCoords out;
  out.source_order = source_order;
  out.target_order = target_order;
  out.phi.assign(static_cast<std::size_t>(target_order) + 1, 0.0);
  out.psi.assign(static_cast<std::size_t>(target_order) + 1, 0.0);
  for (std::size_t m = 0; m < out.phi.size(); ++m) {
    double phi = 0.0;
    for (std::size_t i = 0; i < ab.alpha.size(); ++i) phi += ab.alpha[i] * kernel[m + i];
    double psi = 0.0;
    for (std::size_t i = 0; i < ab.beta.size(); ++i) psi += ab.beta[i] * kernel[m + i];
    out.phi[m] = phi;
    out.psi[m] = psi + delta;
  }
  out.psi[0] = 0.0;
  return out;
}

CurveCoords encode_point(const Curve& input, const Vec2& eta, int target_order, const RootOptions& opts) {
  if (target_order < 1) throw Error(ErrorCode::InvalidArgument, "target order must be >= 1");
  const Curve curve = input.normalized();
  const int n = curve.order();
  const auto kernel = f_kernel(curve, eta, kernel_length(n, target_order) - 1, opts);
  return assemble_coords(alpha_beta(curve, eta), kernel, log_distance_term(curve, eta), n,
                         target_order);
}

Vec2 apply_coords(const CurveCoords& coords, const Curve& deformed) {
  if (deformed.order() > coords.target_order)
    throw Error(ErrorCode::ShapeMismatch, "deformed curve order exceeds the encoded target order");
  const auto count = static_cast<std::size_t>(deformed.order()) + 1;
  Vec2 r;
  for (std::size_t m = 0; m < count; ++m)
    r += coords.phi[m] * deformed[m] + coords.psi[m] * perp(deformed[m]);
  return r;
}

}  // namespace pgc
