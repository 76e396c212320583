#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pgc/coords.hpp"
#include "pgc/error.hpp"
#include "pgc/kernel.hpp"
#include "pgc/oracle.hpp"
#include "test_support.hpp"

using namespace pgc;
using namespace pgc::testing;

namespace {

constexpr double pi = std::numbers::pi;

double quad_phi(const Curve& c, const Vec2& eta, int m) {
  return integrate(
             [&](double t) {
               const Vec2 d = c.evaluate(t) - eta;
               return std::pow(t, m) * cross(d, c.derivative(t)) / (2 * pi * d.squared_norm());
             },
             0, 1)
      .value;
}

// Coefficient of cbar_m^perp in the single-layer integral, before integration by parts.
double quad_psi(const Curve& c, const Vec2& eta, int m) {
  if (m == 0) return 0.0;
  return integrate([&](double t) { return -std::log(distance(c.evaluate(t), eta)) / (2 * pi) * m * std::pow(t, m - 1); },
                   0, 1)
      .value;
}

}  // namespace

TEST_CASE("bottom edge of the unit square, linear target") {
  const Curve edge = bezier({{0, 0}, {1, 0}});
  const Vec2 eta{0.5, 0.5};
  const auto cc = encode_point(edge, eta, 1);
  REQUIRE(cc.phi.size() == 2);
  for (int m = 0; m <= 1; ++m) {
    CHECK(std::abs(cc.phi[std::size_t(m)] - quad_phi(edge, eta, m)) < 1e-8);
    CHECK(std::abs(cc.psi[std::size_t(m)] - quad_psi(edge, eta, m)) < 1e-8);
  }
  // The edge subtends a right angle at the center: Phi_0 = 1/4.
  CHECK(std::abs(cc.phi[0] - 0.25) < 1e-12);
}

TEST_CASE("coordinates match term-by-term quadrature on random curves") {
  Rng rng(53);
  for (int order = 1; order <= 4; ++order) {
    for (int i = 0; i < 10; ++i) {
      const Curve c = random_bezier_curve(rng, order);
      const Vec2 eta = uniform_point(rng, -0.25, 1.25);
      if (curve_distance(c, eta) < 0.05 * curve_extent(c)) continue;
      const int nt = 1 + i % 4;
      const auto cc = encode_point(c, eta, nt);
      CHECK(cc.psi[0] == 0.0);
      for (int m = 0; m <= nt; ++m) {
        const double phi = quad_phi(c, eta, m), psi = quad_psi(c, eta, m);
        CHECK(std::abs(cc.phi[std::size_t(m)] - phi) <= 1e-8 * std::max(1.0, std::abs(phi)));
        CHECK(std::abs(cc.psi[std::size_t(m)] - psi) <= 1e-8 * std::max(1.0, std::abs(psi)));
      }
    }
  }
}

TEST_CASE("apply_coords matches the boundary integrals of one curve") {
  Rng rng(59);
  for (int i = 0; i < 20; ++i) {
    const Curve c = random_bezier_curve(rng, 1 + i % 3);
    const Curve target = random_bezier_curve(rng, 3);
    const Vec2 eta = uniform_point(rng, -0.25, 1.25);
    if (curve_distance(c, eta) < 0.05 * curve_extent(c)) continue;
    const auto cc = encode_point(c, eta, 3);
    const Vec2 ref = quad_dirichlet(c, target, eta).value + quad_neumann(c, target, eta).value;
    CHECK(distance(apply_coords(cc, target), ref) < 1e-7);
  }
}

TEST_CASE("apply_coords order handling") {
  const auto cc = encode_point(bezier({{0, 0}, {1, 0}}), {0.5, 0.5}, 2);
  const Curve lin = bezier({{0, 0}, {2, 1}});
  CHECK(apply_coords(cc, lin) == apply_coords(cc, elevate_degree(lin, 2)));
  CHECK_THROWS_AS(apply_coords(cc, elevate_degree(lin, 3)), Error);
}

TEST_CASE("assembly reads exactly the kernel values it needs") {
  Rng rng(61);
  for (int ns = 1; ns <= 4; ++ns) {
    for (int nt = 1; nt <= 5; ++nt) {
      const Curve c = random_bezier_curve(rng, ns).normalized();
      const Vec2 eta{-0.7, 1.9};
      const int len = kernel_length(c.order(), nt);
      const auto f = f_kernel(c, eta, len - 1);
      const auto ab = alpha_beta(c, eta);
      const double delta = log_distance_term(c, eta);
      const auto exact = assemble_coords(ab, f, delta, c.order(), nt);
      auto longer = f_kernel(c, eta, len + 5);
      const auto extra = assemble_coords(ab, longer, delta, c.order(), nt);
      CHECK(exact.phi == extra.phi);
      CHECK(exact.psi == extra.psi);
      CHECK(exact.psi[0] == 0.0);
      CHECK_THROWS_AS(assemble_coords(ab, std::span(f).first(std::size_t(len - 1)), delta, c.order(), nt),
                      Error);
      const auto encoded = encode_point(c, eta, nt);
      CHECK(encoded.phi == exact.phi);
    }
  }
}

TEST_CASE("a single open curve satisfies the per-curve Neumann identity") {
  // For one curve, sum_m Psi_m cbar_m^perp equals the single-layer integral
  // itself: the boundary term at t = 0 vanishes because t^m = 0 there.
  Rng rng(67);
  const Curve c = random_bezier_curve(rng, 2);
  const Curve target = random_bezier_curve(rng, 4);
  const Vec2 eta{1.7, -0.4};
  const auto cc = encode_point(c, eta, 4);
  Vec2 single;
  for (std::size_t m = 0; m <= 4; ++m) single += cc.psi[m] * perp(target[m]);
  CHECK(distance(single, quad_neumann(c, target, eta).value) < 1e-9);
}

TEST_CASE("zero leading coefficients and endpoint rejection") {
  const Curve c = bezier({{0, 0}, {0.4, 0.6}, {1, 0}});
  const Curve padded = elevate_degree(c, 4);
  // Elevation changes the monomial storage only by appending zeros.
  const auto a = encode_point(c, {0.5, 1.5}, 3), b = encode_point(padded, {0.5, 1.5}, 3);
  CHECK(a.phi == b.phi);
  CHECK(a.psi == b.psi);
  CHECK_THROWS_AS(encode_point(c, {1, 0}, 2), Error);
  CHECK_THROWS_AS(encode_point(c, {0, 0}, 2), Error);
  CHECK_THROWS_AS(encode_point(c, c.evaluate(0.3), 2), Error);
}

TEST_CASE("the closed square reproduces linear functions") {
  const Cage sq = unit_square_cage();
  Rng rng(71);
  for (int i = 0; i < 20; ++i) {
    const Vec2 eta = uniform_point(rng, 0.05, 0.95);
    Vec2 sum;
    for (const auto& c : sq.curves) sum += apply_coords(encode_point(c, eta, 1), c);
    CHECK(distance(sum, eta) < 1e-12);
  }
}
