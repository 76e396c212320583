#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "pgc/coords.hpp"
#include "pgc/error.hpp"
#include "pgc/geometry.hpp"

namespace pgc {

/// Points refused by build_field because they are outside the cage or
/// within the boundary margin.
class RejectedPointsError : public Error {
 public:
  RejectedPointsError(const std::string& what, std::vector<std::size_t> indices)
      : Error(ErrorCode::InvalidArgument, what), indices_(std::move(indices)) {}

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

struct FieldOptions {
  /// Highest target order the field can be viewed at without re-encoding.
  /// Raised to the requested target order if lower.
  int ceiling = 8;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
  /// Points closer than this to the boundary are rejected.
  double boundary_margin = 1e-6;
  RootOptions roots;
};

/// Immutable Phi/Psi coordinates of a point set with respect to every curve
/// of a rest cage, stored up to the ceiling order and viewed at the target
/// order. Copies share the storage.
class CoordinateField {
 public:
  struct Storage {
    std::vector<Vec2> points;
    std::vector<std::uint32_t> source_orders;
    int ceiling = 0;
    std::uint64_t cage_hash = 0;
    /// Layout [(point * curves + curve) * (ceiling + 1) + m].
    std::vector<double> phi;
    std::vector<double> psi;
  };

  CoordinateField() = default;
  CoordinateField(std::shared_ptr<const Storage> storage, int target_order);

  std::size_t size() const { return data_ ? data_->points.size() : 0; }
  std::size_t curve_count() const { return data_ ? data_->source_orders.size() : 0; }
  std::span<const Vec2> points() const;
  int target_order() const { return target_order_; }
  int ceiling() const { return data_ ? data_->ceiling : 0; }
  int source_order(std::size_t curve) const;
  /// Hash of the rest cage geometry and the target order.
  std::uint64_t signature() const;
  std::uint64_t cage_hash() const { return data_ ? data_->cage_hash : 0; }
  const Storage& storage() const { return *data_; }

  /// Views of length target_order + 1.
  std::span<const double> phi(std::size_t point, std::size_t curve) const;
  std::span<const double> psi(std::size_t point, std::size_t curve) const;
  CurveCoords coords(std::size_t point, std::size_t curve) const;

  /// Same storage viewed at another target order. Throws
  /// Error(NeedsRecompute) above the ceiling.
  CoordinateField with_target_order(int target_order) const;

 private:
  std::size_t offset(std::size_t point, std::size_t curve) const;

  std::shared_ptr<const Storage> data_;
  int target_order_ = 0;
};

/// Deformed cage whose curves all carry the field's target order.
struct DeformedCage {
  std::vector<Curve> curves;
};

/// Elevates every curve to target_order. Throws Error(ShapeMismatch) if a
/// curve is of higher order, Error(InvalidArgument) if the cage is not
/// closed within closure_tol.
DeformedCage make_deformed(const Cage& cage, int target_order, double closure_tol = 1e-9);

std::uint64_t cage_hash(const Cage& cage);

struct PointFilter {
  std::vector<Vec2> kept;
  std::vector<std::size_t> kept_indices;
  std::vector<std::size_t> rejected;
};

/// Splits points into those strictly inside the cage, farther than margin
/// from the boundary, and the rest.
PointFilter filter_interior(const Cage& cage, std::span<const Vec2> points, double margin = 1e-6);

/// Encodes every point against every curve. Throws RejectedPointsError if
/// any point fails filter_interior.
CoordinateField build_field(const Cage& cage, std::span<const Vec2> points, int target_order,
                            const FieldOptions& options = {});

/// f(p) = sum over curves of sum_m Phi_m cbar_m + Psi_m cbar_m^perp.
/// Throws Error(ShapeMismatch) on curve count or order mismatch.
std::vector<Vec2> deform(const CoordinateField& field, const DeformedCage& deformed, unsigned threads = 1);

/// Same field expressed against the Bezier control points of an order-n_t
/// target curve: weights w_j with f = sum_j phi_j b_j + psi_j b_j^perp.
CurveCoords to_bezier_coordinates(const CurveCoords& monomial);

/// Regular lattice over the cage bounding box, restricted to interior points.
struct Lattice {
  int resolution = 0;
  BoundingBox box;
  std::vector<Vec2> points;
  /// Lattice position (column, row) of each point.
  std::vector<std::array<int, 2>> cells;
  /// Counter-clockwise triangles, two per lattice cell whose corners all
  /// survived the interior filter.
  std::vector<std::array<std::uint32_t, 3>> triangles;
};

/// Throws Error(InvalidArgument) for resolution < 2 or a degenerate box.
Lattice make_lattice(const Cage& cage, int resolution, double margin = 1e-6);

struct WarpResult {
  Lattice lattice;
  std::vector<Vec2> deformed;
};

WarpResult warp_grid(const Cage& cage, const Cage& deformed, int resolution, int target_order,
                     const FieldOptions& options = {});

/// Binary field format, little-endian:
///   "PGC1", u64 points, u64 curves, u32 source order per curve, u32 target
///   order, u32 ceiling, u64 cage hash, points as f64 pairs, then Phi and Psi
///   as f64 arrays in storage layout.
std::vector<std::uint8_t> serialize_field(const CoordinateField& field);
CoordinateField deserialize_field(std::span<const std::uint8_t> bytes);
void save_field(const std::filesystem::path& path, const CoordinateField& field);
CoordinateField load_field(const std::filesystem::path& path);

}  // namespace pgc
