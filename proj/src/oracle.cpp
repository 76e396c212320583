#include "pgc/oracle.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pgc/error.hpp"

namespace pgc {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
using Gauss = boost::math::quadrature::gauss<double, 10>;

struct Piece {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk21(const std::function<double(double)>& f, double a, double b) {
  const auto& xk = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double f0 = f(c);
  double kron = wk[0] * f0;
  double gauss = 0.0;  // 10-point Gauss has no center node
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double s = f(c - h * xk[i]) + f(c + h * xk[i]);
    kron += wk[i] * s;
    if (i % 2 == 1) gauss += wg[(i - 1) / 2] * s;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

double perp_component(const Vec2& v, int axis) { return axis == 0 ? v.y : -v.x; }

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadratureConfig& cfg) {
  constexpr int kInitialPieces = 16;
  std::priority_queue<Piece> queue;
  double total = 0.0;
  double err = 0.0;
  for (int i = 0; i < kInitialPieces; ++i) {
    const Piece p = gk21(f, a + (b - a) * i / kInitialPieces, a + (b - a) * (i + 1) / kInitialPieces);
    total += p.value;
    err += p.error;
    queue.push(p);
  }
  long subdivisions = 0;
  for (;;) {
    if (!std::isfinite(total) || !std::isfinite(err))
      throw Error(ErrorCode::OracleFailure, "non-finite integrand");
    if (err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) break;
    if (subdivisions >= cfg.max_subdivisions) {
      std::ostringstream os;
      os << "quadrature did not converge: estimate " << total << " +- " << err << " after "
         << subdivisions << " subdivisions";
      throw Error(ErrorCode::OracleFailure, os.str());
    }
    const Piece worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Piece l = gk21(f, worst.a, mid);
    const Piece r = gk21(f, mid, worst.b);
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    queue.push(l);
    queue.push(r);
    ++subdivisions;
  }
  // Re-sum to shed drift from the incremental updates.
  total = 0.0;
  err = 0.0;
  while (!queue.empty()) {
    total += queue.top().value;
    err += queue.top().error;
    queue.pop();
  }
  return {total, err, subdivisions};
}

QuadResult quad_f_kernel(const Curve& curve, const Vec2& eta, int m, const QuadratureConfig& cfg) {
  return integrate(
      [&](double t) {
        return std::pow(t, m) / (2.0 * std::numbers::pi * (eta - curve.evaluate(t)).squared_norm());
      },
      0.0, 1.0, cfg);
}

QuadResult2 quad_dirichlet(const Curve& curve, const Curve& deformed, const Vec2& eta,
                           const QuadratureConfig& cfg) {
  QuadResult2 out;
  for (int axis = 0; axis < 2; ++axis) {
    const auto r = integrate(
        [&](double t) {
          const Vec2 d = curve.evaluate(t) - eta;
          const double kernel = cross(d, curve.derivative(t)) / (2.0 * std::numbers::pi * d.squared_norm());
          const Vec2 cb = deformed.evaluate(t);
          return kernel * (axis == 0 ? cb.x : cb.y);
        },
        0.0, 1.0, cfg);
    (axis == 0 ? out.value.x : out.value.y) = r.value;
    (axis == 0 ? out.error.x : out.error.y) = r.error;
  }
  return out;
}

QuadResult2 quad_neumann(const Curve& curve, const Curve& deformed, const Vec2& eta,
                         const QuadratureConfig& cfg) {
  QuadResult2 out;
  for (int axis = 0; axis < 2; ++axis) {
    const auto r = integrate(
        [&](double t) {
          const double g = -std::log((curve.evaluate(t) - eta).norm()) / (2.0 * std::numbers::pi);
          return g * perp_component(deformed.derivative(t), axis);
        },
        0.0, 1.0, cfg);
    (axis == 0 ? out.value.x : out.value.y) = r.value;
    (axis == 0 ? out.error.x : out.error.y) = r.error;
  }
  return out;
}

Vec2 quad_full_deform(const Cage& cage, const Cage& deformed, const Vec2& eta,
                      const QuadratureConfig& cfg) {
  if (cage.size() != deformed.size())
    throw Error(ErrorCode::ShapeMismatch, "rest and deformed cages differ in curve count");
  Vec2 sum;
  for (std::size_t k = 0; k < cage.size(); ++k) {
    sum += quad_dirichlet(cage[k], deformed[k], eta, cfg).value;
    sum += quad_neumann(cage[k], deformed[k], eta, cfg).value;
  }
  return sum;
}

}  // namespace pgc
