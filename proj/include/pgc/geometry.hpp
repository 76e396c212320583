#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pgc/vec2.hpp"

namespace pgc {

/// Polynomial curve c(t) = sum_k t^k c_k on t in [0, 1].
///
/// Monomial coefficients are the canonical storage; the Bezier control points
/// are a derived view (see monomial_to_bezier). The declared order is
/// coefficients().size() - 1 and may carry zero leading coefficients, which
/// happens for degree-elevated target curves. Code that needs the true order
/// (root finding) calls normalized().
class Curve {
 public:
  /// Throws Error(InvalidCurve) for fewer than two coefficients or
  /// non-finite values.
  explicit Curve(std::vector<Vec2> monomial_coeffs);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Vec2>& coefficients() const { return coeffs_; }
  const Vec2& operator[](std::size_t k) const { return coeffs_[k]; }

  Vec2 evaluate(double t) const;
  Vec2 derivative(double t) const;
  Vec2 start() const { return coeffs_.front(); }
  Vec2 end() const;

  /// Copy with negligible leading coefficients dropped, so that the leading
  /// coefficient is nonzero. A coefficient counts as negligible when its norm
  /// is below rel_tol times the largest coefficient norm. Throws
  /// Error(InvalidCurve) if the curve collapses to a point.
  Curve normalized(double rel_tol = 1e-13) const;

  friend bool operator==(const Curve&, const Curve&) = default;

 private:
  std::vector<Vec2> coeffs_;
};

Curve bezier_to_monomial(std::span<const Vec2> control_points);
std::vector<Vec2> monomial_to_bezier(const Curve& curve);

inline Vec2 evaluate(const Curve& curve, double t) { return curve.evaluate(t); }

/// Same point set, expressed with order target_order. In the monomial basis
/// this pads with zero coefficients; the Bezier view is Bernstein elevation.
Curve elevate_degree(const Curve& curve, int target_order);

/// Endpoint-preserving least-squares approximation by a curve of lower order.
/// Returns elevate_degree(curve, target_order) when target_order >= order.
Curve reduce_degree(const Curve& curve, int target_order);

/// Closed, counter-clockwise loop of curves. Invariants are checked by
/// validate_cage rather than enforced at construction, so that invalid
/// user input can be reported in full.
struct Cage {
  std::vector<Curve> curves;

  std::size_t size() const { return curves.size(); }
  bool empty() const { return curves.empty(); }
  const Curve& operator[](std::size_t k) const { return curves[k]; }

  /// Concatenated Bezier control points, shared joints listed once.
  std::vector<Vec2> control_polygon() const;
  /// Dense boundary polyline: samples_per_curve points per curve, joints
  /// listed once, implicitly closed.
  std::vector<Vec2> sample_boundary(int samples_per_curve = 64) const;

  int max_order() const;
  friend bool operator==(const Cage&, const Cage&) = default;
};

struct BoundingBox {
  Vec2 min;
  Vec2 max;
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  double diagonal() const { return (max - min).norm(); }
};

/// Bounding box of the control polygon, which contains the curves.
BoundingBox bounding_box(const Cage& cage);
/// Diameter of the sampled boundary (max pairwise distance).
double diameter(const Cage& cage, int samples_per_curve = 64);

/// Shoelace area of a closed polyline; positive for CCW traversal.
double signed_area(std::span<const Vec2> polygon);

Cage elevate_degree(const Cage& cage, int target_order);

struct ValidationOptions {
  double closure_tol = 1e-9;
  int samples_per_curve = 64;
  /// Sampled segments closer than this count as intersecting.
  double intersection_tol = 0.0;
};

struct Violation {
  enum class Kind { Empty, ClosureGap, Orientation, SelfIntersection };
  Kind kind;
  /// Curve indices involved. For a closure gap: the curve whose end misses
  /// the start of the next one. For an intersection: the two curves.
  std::size_t curve_a = 0;
  std::size_t curve_b = 0;
  Vec2 location;
  double magnitude = 0.0;
  std::string message;
};

const char* to_string(Violation::Kind kind);

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(Violation::Kind kind) const;
  std::string describe() const;
};

ValidationReport validate_cage(const Cage& cage, const ValidationOptions& opts = {});

/// Winding number of the sampled boundary around p. Points on the polyline
/// get 0, which makes boundary points "outside".
int winding_number(std::span<const Vec2> closed_polyline, const Vec2& p);

bool point_in_cage(const Cage& cage, const Vec2& p, int samples_per_curve = 64);

/// Distance from p to the sampled boundary polyline.
double distance_to_boundary(const Cage& cage, const Vec2& p, int samples_per_curve = 256);
double distance_to_polyline(std::span<const Vec2> closed_polyline, const Vec2& p);
double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// Snaps joint gaps in (0, max_gap] by moving the start of the following
/// curve onto the end of the previous one. Returns the indices of curves whose
/// end was a snapped joint. Larger gaps are left for validate_cage.
std::vector<std::size_t> snap_joints(Cage& cage, double max_gap);

/// Binomial coefficient as a double; exact for the small orders used here.
double binomial(int n, int k);

}  // namespace pgc
