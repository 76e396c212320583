#pragma once

#include <cstddef>
#include <vector>

#include "pgc/roots.hpp"

namespace pgc {

/// g0(w) = log(1 - 1/w) on the principal branch, evaluated as
/// 1/2 log(1 + (1 - 2 Re w)/|w|^2) + i atan2(Im w, |w|^2 - Re w).
/// Throws Error(EndpointSingularity) within 1e-12 of 0 or 1.
Complex g0(Complex w);

/// g~_m(w) = w^m (log(1 - 1/w) + sum_{k=1}^{m-1} 1 / (k w^k)) for m = 0..m_max.
///
/// For |w| <= 1.5 this runs the forward recurrence g~_1 = w g~_0,
/// g~_{m+1} = w (g~_m + 1/m). Outside that disk the forward recurrence
/// amplifies rounding by |w| per step, so the sequence is produced by the
/// backward recurrence of the untruncated g_m, seeded from its Laurent series
/// at a fixed top index.
std::vector<Complex> g_tilde_sequence(Complex w, int m_max);

/// Contribution of a simple non-real root pair (w, conj w) to A F_m,
/// E_m = Im(g~_m(w) / h^i(w)) / Im(w), for m = 0..m_max.
std::vector<double> e_sequence(const RootSet& rs, std::size_t index, int m_max);

/// Contribution of a real root x (a double pole of 1/h):
/// (g~_m' h^i - (h^i)' g~_m) / (h^i)^2 at x, for m = 0..m_max.
std::vector<double> e_sequence_real(const RootSet& rs, std::size_t index, int m_max);

/// Contribution of a repeated root group of multiplicity n: the residues of
/// g~_m / h at the order-n poles w and conj(w), via truncated Taylor series.
/// A repeated group on the real axis is a single pole of order 2n.
/// When rs.polynomial is available and a circle cleanly isolates the group,
/// the residues are taken by contour integration instead, which does not
/// depend on how accurately the merged roots themselves were found.
double e_repeated(const RootSet& rs, std::size_t index, int m);
std::vector<double> e_repeated_sequence(const RootSet& rs, std::size_t index, int m_max);

/// E_m for any root group, dispatched on its class.
std::vector<double> group_contribution(const RootSet& rs, std::size_t index, int m_max);

/// F_m = int_0^1 t^m / (2 pi |eta - c(t)|^2) dt for m = 0..m_max.
std::vector<double> f_kernel(const RootSet& rs, int m_max);
std::vector<double> f_kernel(const Curve& curve, const Vec2& eta, int m_max,
                             const RootOptions& opts = {});

}  // namespace pgc
