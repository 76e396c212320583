#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pgc/error.hpp"
#include "pgc/oracle.hpp"
#include "test_support.hpp"

using namespace pgc;
using namespace pgc::testing;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("integrate is exact on polynomials and accurate on smooth functions") {
  const auto p = integrate([](double t) { return 5 * std::pow(t, 4) - 3 * t * t + 1; }, 0, 1);
  CHECK(p.value == doctest::Approx(1.0).epsilon(1e-15));
  const auto e = integrate([](double t) { return std::exp(t); }, -1, 2);
  CHECK(std::abs(e.value - (std::exp(2.0) - std::exp(-1.0))) < 1e-13);
  // Near-singular peak that forces subdivision.
  const double eps = 1e-3;
  const auto l = integrate([&](double t) { return eps / (t * t + eps * eps); }, -1, 1);
  CHECK(std::abs(l.value - 2 * std::atan(1 / eps)) < 1e-9);
  CHECK(l.subdivisions > 0);
}

TEST_CASE("integrate reports failure when the budget runs out") {
  QuadratureConfig cfg;
  cfg.max_subdivisions = 20;
  CHECK_THROWS_AS(integrate([](double t) { return 1e-8 / (t * t + 1e-16); }, -1, 1, cfg), Error);
  CHECK_THROWS_AS(integrate([](double) { return NAN; }, 0, 1), Error);
}

TEST_CASE("halving the tolerances moves the result by less than the error bound") {
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const Curve c = random_bezier_curve(rng, 3);
    const Vec2 eta = uniform_point(rng, -0.5, 1.5);
    if (curve_distance(c, eta) < 1e-2) continue;
    QuadratureConfig loose, tight;
    tight.abs_tol = loose.abs_tol / 2;
    tight.rel_tol = loose.rel_tol / 2;
    const auto a = quad_f_kernel(c, eta, 3, loose), b = quad_f_kernel(c, eta, 3, tight);
    CHECK(std::abs(a.value - b.value) <= a.error + b.error + 1e-15);
  }
}

TEST_CASE("kernel quadrature agrees with the segment antiderivatives") {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const Vec2 p = uniform_point(rng, -1, 1), q = uniform_point(rng, -1, 1);
    const Vec2 eta = uniform_point(rng, -1.5, 1.5);
    const Curve s({p, q - p});
    if (curve_distance(s, eta) < 1e-2) continue;
    const Vec2 d = q - p;
    const double dd = dot(d, d);
    const double a = dot(eta - p, d) / dd;
    const double b = std::abs(cross(d, eta - p)) / dd;
    const double at = std::atan((1 - a) / b) + std::atan(a / b);
    const double f0 = at / (2 * pi * dd * b);
    // int t / ((t - a)^2 + b^2) = 1/2 log(...) + a/b atan(...)
    const double f1 = (0.5 * std::log(((1 - a) * (1 - a) + b * b) / (a * a + b * b)) + a / b * at) /
                      (2 * pi * dd);
    CHECK(std::abs(quad_f_kernel(s, eta, 0).value - f0) <= 1e-10 * std::abs(f0));
    CHECK(std::abs(quad_f_kernel(s, eta, 1).value - f1) <= 1e-10 * std::abs(f1));
  }
}

TEST_CASE("boundary integrals are linear in the deformed curve") {
  Rng rng(17);
  const Curve c = random_bezier_curve(rng, 2);
  const Curve d1 = random_bezier_curve(rng, 3), d2 = random_bezier_curve(rng, 3);
  std::vector<Vec2> sum;
  for (std::size_t k = 0; k < 4; ++k) sum.push_back(d1[k] + d2[k]);
  const Curve ds(sum);
  const Vec2 eta{0.3, 2.0};
  const Vec2 lhs = quad_dirichlet(c, ds, eta).value + quad_neumann(c, ds, eta).value;
  const Vec2 rhs = quad_dirichlet(c, d1, eta).value + quad_dirichlet(c, d2, eta).value +
                   quad_neumann(c, d1, eta).value + quad_neumann(c, d2, eta).value;
  CHECK(distance(lhs, rhs) < 1e-10);
}

TEST_CASE("identity deformation reproduces the point through quadrature") {
  Rng rng(43);
  for (int i = 0; i < 5; ++i) {
    const Cage cage = random_cage(rng, 4 + i, 1 + i % 3);
    for (const Vec2& eta : random_interior_points(rng, cage, 4, 0.02))
      CHECK(distance(quad_full_deform(cage, cage, eta), eta) < 1e-8);
  }
  CHECK_THROWS_AS(quad_full_deform(unit_square_cage(), cubic_square_cage(), {0.5, 0.5}), Error);
}

TEST_CASE("kernel quadrature on simple configurations") {
  const Curve segment({{0, 0}, {1, 0}});
  CHECK(quad_f_kernel(segment, {0.5, 1}, 0).value == doctest::Approx(std::atan(0.5) / pi).epsilon(1e-12));

  const Curve parabola({{0, 0}, {1, 0}, {0, 1}});
  const double f0 = quad_f_kernel(parabola, {0, 0.25}, 0).value;
  CHECK(quad_f_kernel(parabola, {0, 0.25}, 12).value < f0);
  // Reference value at the parabola focus: the integrand is smooth there.
  CHECK(f0 == doctest::Approx(0.95948067364616598888).epsilon(1e-12));
}

TEST_CASE("zero, constant and translated deformed curves") {
  Rng rng(19);
  const Curve c = random_bezier_curve(rng, 3);
  const Vec2 eta{0.5, 1.7};
  const Curve zero({{0, 0}, {0, 0}});
  CHECK(quad_dirichlet(c, zero, eta).value == Vec2{0, 0});
  const Curve constant({{0.3, -2.0}, {0, 0}});
  CHECK(quad_neumann(c, constant, eta).value.norm() == 0.0);

  const Cage cage = random_cage(rng, 6, 2);
  const Vec2 d{0.25, -0.75};
  Cage moved = cage;
  for (auto& curve : moved.curves) {
    auto k = curve.coefficients();
    k[0] += d;
    curve = Curve(k);
  }
  for (const Vec2& p : random_interior_points(rng, cage, 5, 0.02))
    CHECK(distance(quad_full_deform(cage, moved, p), p + d) < 1e-8);
}

TEST_CASE("reflection across the x axis") {
  // With R = diag(1, -1), (R v)^perp = -R v^perp, so the single-layer term
  // maps to -R of itself and the double layer to R of itself with the
  // opposite normal, i.e. -R as well.
  Rng rng(23);
  auto reflect = [](const Curve& c) {
    auto k = c.coefficients();
    for (auto& v : k) v.y = -v.y;
    return Curve(k);
  };
  for (int i = 0; i < 5; ++i) {
    const Curve c = random_bezier_curve(rng, 2), d = random_bezier_curve(rng, 3);
    const Vec2 eta = uniform_point(rng, -0.5, 1.5);
    if (curve_distance(c, eta) < 0.05) continue;
    const Vec2 r_eta{eta.x, -eta.y};
    const Vec2 n = quad_neumann(c, d, eta).value, nr = quad_neumann(reflect(c), reflect(d), r_eta).value;
    CHECK(nr.x == doctest::Approx(-n.x).epsilon(1e-10));
    CHECK(nr.y == doctest::Approx(n.y).epsilon(1e-10));
    const Vec2 a = quad_dirichlet(c, d, eta).value, ar = quad_dirichlet(reflect(c), reflect(d), r_eta).value;
    CHECK(ar.x == doctest::Approx(-a.x).epsilon(1e-10));
    CHECK(ar.y == doctest::Approx(a.y).epsilon(1e-10));
  }
}
