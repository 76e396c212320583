#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "pgc/geometry.hpp"

namespace pgc {

using Complex = std::complex<double>;

/// Tolerances for root finding and classification.
struct RootOptions {
  /// Accepted |p(w)| relative to sum_k |a_k| |w|^k after polishing.
  double residual_tol = 1e-10;
  /// Roots closer than this (absolute, in parameter space) are merged.
  double cluster_eps = 1e-7;
  /// |Im w| below this classifies a simple root as real.
  double real_class_tol = 1e-9;
  /// eta closer than this to the curve is rejected as on-boundary.
  double on_curve_tol = 1e-9;
};

/// All roots of sum_k coeffs[k] t^k (ascending powers, nonzero leading
/// coefficient), with multiplicity. Closed form for degree <= 2, Aberth-Ehrlich
/// iteration above, then one guarded Newton step per root. Throws
/// RootFindingError if a polished root still has a large residual.
std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs,
                                      double residual_tol = 1e-10);

enum class RootClass { General, Real, Repeated };

const char* to_string(RootClass c);

struct Root {
  Complex omega;
  int multiplicity = 1;
  RootClass cls = RootClass::General;
  /// For a repeated group: the individual computed roots that were merged.
  /// Their spread around omega feeds a correction in the residue.
  std::vector<Complex> members;
};

/// Roots w of a(t) = eta - c(t) over C, grouped by multiplicity. Each group
/// stands for the pole pair (w, conj(w)) of 1 / |eta - c(t)|^2.
struct RootSet {
  std::vector<Root> roots;
  /// A = 2 pi |c_n|^2, so that 2 pi |eta - c(t)|^2 = A h(t) with h monic.
  double normalization = 0.0;
  /// Order of the normalized source curve.
  int order = 0;
  double real_class_tol = 1e-9;
  /// Coefficients of a(t) = eta - c(t) as a complex polynomial, ascending.
  std::vector<Complex> polynomial;

  int total_multiplicity() const;
};

RootSet complex_roots(const Curve& curve, const Vec2& eta, const RootOptions& opts = {});

/// h^i(w): product of (w - w_j)(w - conj(w_j)), with multiplicity, over every
/// root group j other than `index`.
Complex other_roots_factor(const RootSet& rs, std::size_t index, Complex w);

}  // namespace pgc
