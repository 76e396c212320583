#include "pgc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "pgc/error.hpp"

namespace pgc {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

Curve::Curve(std::vector<Vec2> monomial_coeffs) : coeffs_(std::move(monomial_coeffs)) {
  if (coeffs_.size() < 2)
    throw Error(ErrorCode::InvalidCurve, "a curve needs at least two coefficients");
  for (const auto& c : coeffs_)
    if (!c.finite()) throw Error(ErrorCode::InvalidCurve, "non-finite curve coefficient");
}

Vec2 Curve::evaluate(double t) const {
  Vec2 r = coeffs_.back();
  for (auto k = coeffs_.size() - 1; k-- > 0;) r = r * t + coeffs_[k];
  return r;
}

Vec2 Curve::derivative(double t) const {
  const auto n = coeffs_.size() - 1;
  Vec2 r = coeffs_[n] * static_cast<double>(n);
  for (auto k = n - 1; k >= 1; --k) r = r * t + coeffs_[k] * static_cast<double>(k);
  return r;
}

Vec2 Curve::end() const {
  Vec2 r;
  for (const auto& c : coeffs_) r += c;
  return r;
}

Curve Curve::normalized(double rel_tol) const {
  double scale = 0.0;
  for (std::size_t k = 1; k < coeffs_.size(); ++k) scale = std::max(scale, coeffs_[k].norm());
  if (scale == 0.0) throw Error(ErrorCode::InvalidCurve, "curve degenerates to a point");
  auto n = coeffs_.size();
  while (n > 2 && coeffs_[n - 1].norm() <= rel_tol * scale) --n;
  if (coeffs_[n - 1].norm() <= rel_tol * scale)
    throw Error(ErrorCode::InvalidCurve, "curve degenerates to a point");
  return Curve(std::vector<Vec2>(coeffs_.begin(), coeffs_.begin() + static_cast<long>(n)));
}

Curve bezier_to_monomial(std::span<const Vec2> b) {
  if (b.size() < 2)
    throw Error(ErrorCode::InvalidCurve, "a Bezier curve needs at least two control points");
  const int n = static_cast<int>(b.size()) - 1;
  std::vector<Vec2> c(b.size());
  // c_k = C(n,k) * sum_j (-1)^(k-j) C(k,j) b_j
  for (int k = 0; k <= n; ++k) {
    Vec2 acc;
    for (int j = 0; j <= k; ++j) {
      const double w = ((k - j) % 2 ? -1.0 : 1.0) * binomial(k, j);
      acc += b[static_cast<std::size_t>(j)] * w;
    }
    c[static_cast<std::size_t>(k)] = acc * binomial(n, k);
  }
  return Curve(std::move(c));
}

std::vector<Vec2> monomial_to_bezier(const Curve& curve) {
  const int n = curve.order();
  std::vector<Vec2> b(static_cast<std::size_t>(n + 1));
  // b_j = sum_{k<=j} C(j,k) / C(n,k) c_k
  for (int j = 0; j <= n; ++j) {
    Vec2 acc;
    for (int k = 0; k <= j; ++k)
      acc += curve[static_cast<std::size_t>(k)] * (binomial(j, k) / binomial(n, k));
    b[static_cast<std::size_t>(j)] = acc;
  }
  return b;
}

Curve elevate_degree(const Curve& curve, int target_order) {
  if (target_order < curve.order())
    throw Error(ErrorCode::InvalidArgument, "elevate_degree: target order below curve order");
  auto c = curve.coefficients();
  c.resize(static_cast<std::size_t>(target_order) + 1, Vec2{});
  return Curve(std::move(c));
}

Curve reduce_degree(const Curve& curve, int target_order) {
  if (target_order < 1) throw Error(ErrorCode::InvalidArgument, "reduce_degree: order must be >= 1");
  if (target_order >= curve.order()) return elevate_degree(curve, target_order);

  const Vec2 p0 = curve.start();
  const Vec2 p1 = curve.end();
  const int n = target_order;
  std::vector<Vec2> ctrl(static_cast<std::size_t>(n + 1));
  ctrl.front() = p0;
  ctrl.back() = p1;
  if (n >= 2) {
    // Interior Bernstein control points by least squares on dense samples.
    constexpr int samples = 128;
    const int unknowns = n - 1;
    Eigen::MatrixXd a(samples, unknowns);
    Eigen::MatrixXd rhs(samples, 2);
    for (int s = 0; s < samples; ++s) {
      const double t = (s + 0.5) / samples;
      auto bern = [&](int j) {
        return binomial(n, j) * std::pow(t, j) * std::pow(1.0 - t, n - j);
      };
      for (int j = 1; j < n; ++j) a(s, j - 1) = bern(j);
      const Vec2 target = curve.evaluate(t) - p0 * bern(0) - p1 * bern(n);
      rhs(s, 0) = target.x;
      rhs(s, 1) = target.y;
    }
    const Eigen::MatrixXd sol = a.colPivHouseholderQr().solve(rhs);
    for (int j = 1; j < n; ++j) ctrl[static_cast<std::size_t>(j)] = {sol(j - 1, 0), sol(j - 1, 1)};
  }
  return bezier_to_monomial(ctrl);
}

std::vector<Vec2> Cage::control_polygon() const {
  std::vector<Vec2> poly;
  for (const auto& c : curves) {
    auto b = monomial_to_bezier(c);
    poly.insert(poly.end(), b.begin(), b.end() - 1);
  }
  return poly;
}

std::vector<Vec2> Cage::sample_boundary(int samples_per_curve) const {
  std::vector<Vec2> poly;
  poly.reserve(curves.size() * static_cast<std::size_t>(samples_per_curve));
  for (const auto& c : curves)
    for (int s = 0; s < samples_per_curve; ++s)
      poly.push_back(c.evaluate(static_cast<double>(s) / samples_per_curve));
  return poly;
}

int Cage::max_order() const {
  int m = 0;
  for (const auto& c : curves) m = std::max(m, c.order());
  return m;
}

BoundingBox bounding_box(const Cage& cage) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  BoundingBox box{{inf, inf}, {-inf, -inf}};
  for (const auto& c : cage.curves)
    for (const auto& p : monomial_to_bezier(c)) {
      box.min = {std::min(box.min.x, p.x), std::min(box.min.y, p.y)};
      box.max = {std::max(box.max.x, p.x), std::max(box.max.y, p.y)};
    }
  return box;
}

double diameter(const Cage& cage, int samples_per_curve) {
  const auto poly = cage.sample_boundary(samples_per_curve);
  double d = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    for (std::size_t j = i + 1; j < poly.size(); ++j) d = std::max(d, distance(poly[i], poly[j]));
  return d;
}

double signed_area(std::span<const Vec2> polygon) {
  double a = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i)
    a += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
  return 0.5 * a;
}

Cage elevate_degree(const Cage& cage, int target_order) {
  Cage out;
  for (const auto& c : cage.curves) out.curves.push_back(elevate_degree(c, target_order));
  return out;
}

const char* to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::Empty: return "empty";
    case Violation::Kind::ClosureGap: return "closure-gap";
    case Violation::Kind::Orientation: return "orientation";
    case Violation::Kind::SelfIntersection: return "self-intersection";
  }
  return "unknown";
}

bool ValidationReport::has(Violation::Kind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::describe() const {
  if (ok()) return "cage is valid";
  std::ostringstream os;
  for (const auto& v : violations) os << to_string(v.kind) << ": " << v.message << '\n';
  return os.str();
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squared_norm();
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + ab * t);
}

namespace {

int orient_sign(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross(b - a, c - a);
  return (v > 0) - (v < 0);
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2, double tol) {
  const int o1 = orient_sign(p1, p2, q1);
  const int o2 = orient_sign(p1, p2, q2);
  const int o3 = orient_sign(q1, q2, p1);
  const int o4 = orient_sign(q1, q2, p2);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  const double d = std::min({segment_distance(q1, p1, p2), segment_distance(q2, p1, p2),
                             segment_distance(p1, q1, q2), segment_distance(p2, q1, q2)});
  return d <= tol;
}

}  // namespace

ValidationReport validate_cage(const Cage& cage, const ValidationOptions& opts) {
  ValidationReport report;
  if (cage.empty()) {
    report.violations.push_back({Violation::Kind::Empty, 0, 0, {}, 0.0, "cage has no curves"});
    return report;
  }
  const auto n = cage.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 e = cage[k].end();
    const Vec2 s = cage[(k + 1) % n].start();
    const double gap = distance(e, s);
    if (gap > opts.closure_tol) {
      std::ostringstream os;
      os << "curve " << k << " ends at (" << e.x << ", " << e.y << ") but curve " << (k + 1) % n
         << " starts at (" << s.x << ", " << s.y << "), gap " << gap;
      report.violations.push_back({Violation::Kind::ClosureGap, k, (k + 1) % n, e, gap, os.str()});
    }
  }

  const auto ctrl = cage.control_polygon();
  const double area = signed_area(ctrl);
  if (!(area > 0.0)) {
    std::ostringstream os;
    os << "control polygon has signed area " << area << "; curves must run counter-clockwise";
    report.violations.push_back({Violation::Kind::Orientation, 0, 0, {}, area, os.str()});
  }

  // Sampled polyline segment tests; segments sharing a sample are skipped.
  const int spc = opts.samples_per_curve;
  std::vector<Vec2> pts;
  std::vector<std::size_t> owner;
  for (std::size_t k = 0; k < n; ++k)
    for (int s = 0; s <= spc; ++s) {
      if (s == spc && k + 1 < n) continue;  // joint listed once
      pts.push_back(cage[k].evaluate(static_cast<double>(s) / spc));
      owner.push_back(k);
    }
  const std::size_t segs = pts.size() - 1;
  for (std::size_t i = 0; i < segs; ++i) {
    for (std::size_t j = i + 2; j < segs; ++j) {
      if (i == 0 && j == segs - 1) continue;
      if (segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1], opts.intersection_tol)) {
        std::ostringstream os;
        os << "curve " << owner[i] << " crosses curve " << owner[j] << " near (" << pts[j].x << ", "
           << pts[j].y << ")";
        report.violations.push_back(
            {Violation::Kind::SelfIntersection, owner[i], owner[j], pts[j], 0.0, os.str()});
        if (report.violations.size() > 32) return report;
      }
    }
  }
  return report;
}

int winding_number(std::span<const Vec2> poly, const Vec2& p) {
  if (distance_to_polyline(poly, p) == 0.0) return 0;
  int wn = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    if (a.y <= p.y) {
      if (b.y > p.y && cross(b - a, p - a) > 0) ++wn;
    } else if (b.y <= p.y && cross(b - a, p - a) < 0) {
      --wn;
    }
  }
  return wn;
}

bool point_in_cage(const Cage& cage, const Vec2& p, int samples_per_curve) {
  const auto poly = cage.sample_boundary(samples_per_curve);
  return winding_number(poly, p) == 1;
}

double distance_to_polyline(std::span<const Vec2> poly, const Vec2& p) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i)
    d = std::min(d, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  return d;
}

double distance_to_boundary(const Cage& cage, const Vec2& p, int samples_per_curve) {
  return distance_to_polyline(cage.sample_boundary(samples_per_curve), p);
}

std::vector<std::size_t> snap_joints(Cage& cage, double max_gap) {
  std::vector<std::size_t> snapped;
  const auto n = cage.size();
  for (std::size_t k = 0; k < n; ++k) {
    auto& next = cage.curves[(k + 1) % n];
    const Vec2 e = cage[k].end();
    const double gap = distance(e, next.start());
    // Rounding-level gaps are left alone so callers only hear about real ones.
    if (gap > 1e-14 * (1.0 + e.norm()) && gap <= max_gap) {
      auto b = monomial_to_bezier(next);
      b.front() = e;
      next = bezier_to_monomial(b);
      snapped.push_back(k);
    }
  }
  return snapped;
}

}  // namespace pgc
