#pragma once

#include <span>
#include <vector>

#include "pgc/kernel.hpp"

namespace pgc {

/// Coefficients of the numerator polynomials of the boundary integrands:
///   alpha: t -> (c(t) - eta) . c'(t)^perp   (2 n_s - 1 entries)
///   beta:  t -> (c(t) - eta) . c'(t)        (2 n_s entries)
struct AlphaBeta {
  std::vector<double> alpha;
  std::vector<double> beta;
};

/// Generic polynomial-product convolution, valid for any order.
AlphaBeta alpha_beta(const Curve& curve, const Vec2& eta);

/// -1/(2 pi) log |c(1) - eta|, with c(1) = sum_{k=0}^{n_s} c_k.
double log_distance_term(const Curve& curve, const Vec2& eta);

/// Coordinates of one rest point with respect to one curve: the deformed
/// curve's contribution is sum_m phi[m] cbar_m + psi[m] cbar_m^perp.
struct CurveCoords {
  std::vector<double> phi;
  std::vector<double> psi;
  int source_order = 0;
  int target_order = 0;
};

/// Number of kernel values F_0 .. F_{n_t + 2 n_s - 1} that encoding reads.
constexpr int kernel_length(int source_order, int target_order) {
  return target_order + 2 * source_order;
}

/// Phi[m] = sum_i alpha[i] F[m+i], Psi[m] = sum_i beta[i] F[m+i] + delta for
/// m = 0..n_t, then Psi[0] = 0. `kernel` must hold at least
/// kernel_length(n_s, n_t) values and no more are read.
CurveCoords assemble_coords(const AlphaBeta& ab, std::span<const double> kernel, double delta,
                            int source_order, int target_order);

/// Encodes eta against one curve. The curve is normalized first, so a zero
/// leading coefficient does not change the result.
CurveCoords encode_point(const Curve& curve, const Vec2& eta, int target_order,
                         const RootOptions& opts = {});

/// sum_m phi[m] cbar_m + psi[m] cbar_m^perp. A deformed curve of lower order
/// is treated as zero-padded; a higher one throws Error(ShapeMismatch).
Vec2 apply_coords(const CurveCoords& coords, const Curve& deformed);

}  // namespace pgc
