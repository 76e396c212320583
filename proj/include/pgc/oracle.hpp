#pragma once

#include <functional>

#include "pgc/geometry.hpp"

namespace pgc {

/// Adaptive quadrature settings for the reference integrals.
struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  long max_subdivisions = 1L << 20;
};

struct QuadResult {
  double value = 0.0;
  /// Sum of the Gauss-Kronrod error estimates over the final partition.
  double error = 0.0;
  long subdivisions = 0;
};

struct QuadResult2 {
  Vec2 value;
  Vec2 error;
};

/// Globally adaptive 21-point Gauss-Kronrod integration of f over [a, b]:
/// the interval with the largest error estimate is bisected until the total
/// estimate is within max(abs_tol, rel_tol |I|). Throws Error(OracleFailure)
/// when the subdivision budget runs out first.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadratureConfig& cfg = {});

/// int_0^1 t^m / (2 pi |eta - c(t)|^2) dt by direct quadrature.
QuadResult quad_f_kernel(const Curve& curve, const Vec2& eta, int m, const QuadratureConfig& cfg = {});

/// Double-layer term: int_0^1 cbar(t) ((c - eta) . c'^perp) / (2 pi |c - eta|^2) dt.
QuadResult2 quad_dirichlet(const Curve& curve, const Curve& deformed, const Vec2& eta,
                           const QuadratureConfig& cfg = {});

/// Single-layer term in its log-kernel form, before integration by parts:
/// int_0^1 -1/(2 pi) log|c - eta| cbar'(t)^perp dt.
QuadResult2 quad_neumann(const Curve& curve, const Curve& deformed, const Vec2& eta,
                         const QuadratureConfig& cfg = {});

/// Sum over the cage of both terms: the deformed position of eta.
Vec2 quad_full_deform(const Cage& cage, const Cage& deformed, const Vec2& eta,
                      const QuadratureConfig& cfg = {});

}  // namespace pgc
