#include "pgc/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>

#include "pgc/error.hpp"

namespace pgc {

namespace {

constexpr double kForwardRadius = 1.5;
constexpr int kMinBackwardTop = 40;
constexpr int kMaxSeriesTerms = 100000;

// Truncated Taylor series sum_k c[k] d^k around an expansion point.
using Taylor = std::vector<Complex>;

Taylor mul(const Taylor& a, const Taylor& b) {
  Taylor r(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < a.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Taylor inverse(const Taylor& a) {
  Taylor r(a.size(), 0.0);
  r[0] = 1.0 / a[0];
  for (std::size_t k = 1; k < a.size(); ++k) {
    Complex s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) s += a[j] * r[k - j];
    r[k] = -s * r[0];
  }
  return r;
}

Taylor add_scalar(Taylor a, Complex s) {
  a[0] += s;
  return a;
}

double norm_inf(const Taylor& a) {
  double n = 0.0;
  for (const auto& c : a) n = std::max(n, std::abs(c));
  return n;
}

// Taylor series of w itself at z.
Taylor identity_series(Complex z, std::size_t len) {
  Taylor j(len, 0.0);
  j[0] = z;
  if (len > 1) j[1] = 1.0;
  return j;
}

// Taylor series of g~_m around z for m = 0..m_max.
std::vector<Taylor> g_tilde_series(Complex z, int m_max, std::size_t len) {
  std::vector<Taylor> g(static_cast<std::size_t>(m_max) + 1);
  const Taylor w = identity_series(z, len);
  if (std::abs(z) <= kForwardRadius) {
    Taylor g0s(len, 0.0);
    g0s[0] = g0(z);
    for (std::size_t k = 1; k < len; ++k) {
      const double sign = (k % 2) ? 1.0 : -1.0;
      const double kk = static_cast<double>(k);
      g0s[k] = sign / kk * (std::pow(z - 1.0, -kk) - std::pow(z, -kk));
    }
    g[0] = g0s;
    for (int m = 0; m < m_max; ++m)
      g[static_cast<std::size_t>(m + 1)] =
          m == 0 ? mul(w, g[0]) : mul(w, add_scalar(g[static_cast<std::size_t>(m)], 1.0 / m));
    return g;
  }

  // Backward: untruncated g_m = -sum_{k>=1} w^-k / (m + k), g_m = (g_{m+1} - 1/(m+1)) / w.
  const int top = std::max(m_max, kMinBackwardTop) + 1;
  const Taylor winv = inverse(w);
  Taylor power = winv;
  Taylor sum(len, 0.0);
  for (int k = 1; k <= kMaxSeriesTerms; ++k) {
    const double denom = top + k;
    double term_norm = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const Complex term = power[i] / denom;
      sum[i] -= term;
      term_norm = std::max(term_norm, std::abs(term));
    }
    if (term_norm <= 1e-18 * norm_inf(sum)) break;
    power = mul(power, winv);
  }
  Taylor cur = sum;
  for (int m = top - 1; m >= 0; --m) {
    cur = mul(add_scalar(cur, -1.0 / (m + 1)), winv);
    if (m <= m_max) g[static_cast<std::size_t>(m)] = m == 0 ? cur : add_scalar(cur, -1.0 / m);
  }
  return g;
}

const Root& checked_root(const RootSet& rs, std::size_t index) {
  if (index >= rs.roots.size()) throw Error(ErrorCode::InvalidArgument, "root index out of range");
  return rs.roots[index];
}

// a, a' and a'' at w for a(t) = eta - c(t).
std::array<Complex, 3> polynomial_jet(const std::vector<Complex>& a, Complex w) {
  Complex p = 0.0, dp = 0.0, ddp = 0.0;
  for (auto j = a.size(); j-- > 0;) {
    ddp = ddp * w + 2.0 * dp;
    dp = dp * w + p;
    p = p * w + a[j];
  }
  return {p, dp, ddp};
}

// h^i at a simple root w, through h = a(t) a*(t) / |a_n|^2 with a* the
// conjugate-coefficient polynomial: h^i(w) = a'(w) a*(w) / (|a_n|^2 (w - conj w)).
// This avoids multiplying out the other roots, whose errors would otherwise
// leak into every residue when some of them form a near-multiple cluster.
Complex other_factor_from_polynomial(const RootSet& rs, Complex w) {
  const auto& a = rs.polynomial;
  Complex q = 0.0;
  for (auto j = a.size(); j-- > 0;) q = q * w + std::conj(a[j]);
  return polynomial_jet(a, w)[1] * q / (std::norm(a.back()) * (w - std::conj(w)));
}

double distance_to_unit_segment(Complex z) {
  return std::abs(z - std::clamp(z.real(), 0.0, 1.0));
}

// Sum of the residues of g~_m / h inside the circle |w - center| = radius,
// by the trapezoidal rule, which converges geometrically when the enclosed
// poles are well inside and everything else well outside. h is evaluated from
// the polynomial coefficients, so the exact positions of the enclosed poles
// never enter.
std::vector<Complex> contour_residues(const RootSet& rs, Complex center, double radius, int m_max) {
  constexpr int nodes = 64;
  const auto& a = rs.polynomial;
  const double lead = std::norm(a.back());
  std::vector<Complex> sum(static_cast<std::size_t>(m_max) + 1, 0.0);
  for (int k = 0; k < nodes; ++k) {
    const Complex step = std::polar(radius, 2.0 * std::numbers::pi * (k + 0.5) / nodes);
    const Complex w = center + step;
    Complex p = 0.0, q = 0.0;
    for (auto j = a.size(); j-- > 0;) {
      p = p * w + a[j];
      q = q * w + std::conj(a[j]);
    }
    const Complex weight = step * lead / (p * q * static_cast<double>(nodes));
    const auto g = g_tilde_sequence(w, m_max);
    for (std::size_t m = 0; m < sum.size(); ++m) sum[m] += weight * g[m];
  }
  return sum;
}

// Contribution of a root cluster by contour integration, or nothing if no
// circle separates it cleanly from the other singularities.
std::optional<std::vector<double>> cluster_by_contour(const RootSet& rs, std::size_t index, int m_max) {
  if (rs.polynomial.empty()) return std::nullopt;
  const Root& root = rs.roots[index];
  const Complex z = root.omega;
  double spread = 0.0;
  for (const Complex& r : root.members) spread = std::max(spread, std::abs(r - z));

  auto clearance = [&](Complex c) {
    double d = distance_to_unit_segment(c);
    for (std::size_t j = 0; j < rs.roots.size(); ++j) {
      if (j == index) continue;
      const Root& o = rs.roots[j];
      double own = 0.0;
      for (const Complex& r : o.members) own = std::max(own, std::abs(r - o.omega));
      d = std::min({d, std::abs(c - o.omega) - own, std::abs(c - std::conj(o.omega)) - own});
    }
    return d;
  };
  constexpr double margin = 8.0;

  // One side: a circle around z that leaves out the conjugate cluster.
  const double side = std::min(clearance(z), 2.0 * std::abs(z.imag()) - spread);
  if (margin * spread < side) {
    const auto res = contour_residues(rs, z, 0.5 * side, m_max);
    std::vector<double> e(res.size());
    for (std::size_t m = 0; m < e.size(); ++m) e[m] = 2.0 * res[m].real();
    return e;
  }
  // Both sides: a circle on the real axis around the cluster and its mirror.
  const Complex c(z.real(), 0.0);
  const double both = clearance(c);
  if (margin * (std::abs(z.imag()) + spread) < both) {
    const auto res = contour_residues(rs, c, 0.5 * both, m_max);
    std::vector<double> e(res.size());
    for (std::size_t m = 0; m < e.size(); ++m) e[m] = res[m].real();
    return e;
  }
  return std::nullopt;
}

// A simple root w = x + iy close to the real axis. With
// F(t) = g~_m(t) / h^i(t), analytic around x, E_m = (F(w) - F(conj w)) / (2iy)
// is a divided difference, and expanding F at x gives
//   E_m = sum_j (-y^2)^j F_{2j+1}
// in the Taylor coefficients F_k of F at x. This has no 1/y cancellation and
// reduces to the real-root formula at y = 0.
std::optional<std::vector<double>> near_axis_series(const RootSet& rs, std::size_t index, int m_max) {
  constexpr double max_ratio = 0.05;
  constexpr std::size_t terms = 8;
  const Root& root = rs.roots[index];
  const double x = root.omega.real();
  const double y = std::abs(root.omega.imag());
  // Radius of convergence: the branch cut [0, 1] of g~ and the other poles.
  double radius = distance_to_unit_segment(Complex(x, 0.0));
  for (std::size_t j = 0; j < rs.roots.size(); ++j)
    if (j != index) radius = std::min(radius, std::abs(Complex(x, 0.0) - rs.roots[j].omega));
  if (!(y < max_ratio * radius)) return std::nullopt;

  const std::size_t len = 2 * terms;
  const Taylor w = identity_series(Complex(x, 0.0), len);
  Taylor hi(len, 0.0);
  hi[0] = 1.0;
  auto times_pair = [&](Complex r) {
    hi = mul(hi, mul(add_scalar(w, -r), add_scalar(w, -std::conj(r))));
  };
  for (std::size_t j = 0; j < rs.roots.size(); ++j) {
    if (j == index) continue;
    const Root& o = rs.roots[j];
    if (o.members.empty()) {
      for (int k = 0; k < o.multiplicity; ++k) times_pair(o.omega);
    } else {
      for (const Complex& r : o.members) times_pair(r);
    }
  }
  const Taylor inv = inverse(hi);
  const auto g = g_tilde_series(Complex(x, 0.0), m_max, len);
  std::vector<double> e(static_cast<std::size_t>(m_max) + 1);
  for (std::size_t m = 0; m < e.size(); ++m) {
    const Taylor f = mul(g[m], inv);
    double sum = 0.0, scale = 1.0;
    for (std::size_t j = 0; j < terms; ++j, scale *= -y * y) sum += scale * f[2 * j + 1].real();
    e[m] = sum;
  }
  return e;
}

}  // namespace

Complex g0(Complex w) {
  if (std::abs(w) < 1e-12 || std::abs(w - 1.0) < 1e-12)
    throw Error(ErrorCode::EndpointSingularity, "g0 evaluated at a curve extremity");
  const double x = w.real();
  const double y = w.imag();
  const double r2 = x * x + y * y;
  return {0.5 * std::log1p((1.0 - 2.0 * x) / r2), std::atan2(y, r2 - x)};
}

std::vector<Complex> g_tilde_sequence(Complex w, int m_max) {
  if (m_max < 0) throw Error(ErrorCode::InvalidArgument, "m_max must be >= 0");
  std::vector<Complex> g(static_cast<std::size_t>(m_max) + 1);
  if (std::abs(w) <= kForwardRadius) {
    g[0] = g0(w);
    for (int m = 0; m < m_max; ++m)
      g[static_cast<std::size_t>(m + 1)] = m == 0 ? w * g[0] : w * (g[static_cast<std::size_t>(m)] + 1.0 / m);
    return g;
  }
  const auto series = g_tilde_series(w, m_max, 1);
  for (int m = 0; m <= m_max; ++m) g[static_cast<std::size_t>(m)] = series[static_cast<std::size_t>(m)][0];
  return g;
}

std::vector<double> e_sequence(const RootSet& rs, std::size_t index, int m_max) {
  const Root& root = checked_root(rs, index);
  const Complex w = root.omega;
  const double y = w.imag();
  if (root.multiplicity != 1 || std::abs(y) < rs.real_class_tol)
    throw Error(ErrorCode::WrongClassification, "e_sequence needs a simple non-real root");
  if (auto e = near_axis_series(rs, index, m_max)) return *e;
  bool clustered = false;
  for (const auto& r : rs.roots) clustered |= !r.members.empty();
  const Complex h = clustered && !rs.polynomial.empty() && std::abs(y) > 1e-4
                        ? other_factor_from_polynomial(rs, w)
                        : other_roots_factor(rs, index, w);
  std::vector<double> e(static_cast<std::size_t>(m_max) + 1);

  if (std::abs(w) > kForwardRadius) {
    const auto g = g_tilde_sequence(w, m_max);
    for (std::size_t m = 0; m < e.size(); ++m) e[m] = std::imag(g[m] / h) / y;
    return e;
  }

  // W_0 = g0/h, E_0 = Im W_0 / Im w, W_1 = w W_0, E_1 = Re(w) E_0 + Re W_0,
  // W_{m+1} = w (W_m + 1/(m h)),
  // E_{m+1} = Re(w) E_m + Re W_m + (1/m) Im(w / (Im(w) h)).
  Complex wm = g0(w) / h;
  e[0] = wm.imag() / y;
  const double correction = std::imag(w / (y * h));
  for (int m = 0; m < m_max; ++m) {
    const auto mi = static_cast<std::size_t>(m);
    if (m == 0) {
      e[1] = w.real() * e[0] + wm.real();
      wm = w * wm;
    } else {
      e[mi + 1] = w.real() * e[mi] + wm.real() + correction / m;
      wm = w * (wm + 1.0 / (double(m) * h));
    }
  }
  return e;
}

std::vector<double> e_sequence_real(const RootSet& rs, std::size_t index, int m_max) {
  const Root& root = checked_root(rs, index);
  if (root.multiplicity != 1 || std::abs(root.omega.imag()) >= rs.real_class_tol)
    throw Error(ErrorCode::WrongClassification, "e_sequence_real needs a simple real root");
  const double x = root.omega.real();
  if (x >= 0.0 && x <= 1.0) throw Error(ErrorCode::OnBoundary, "real root inside [0, 1]: point on curve");

  // h^i and its derivative at x. From the polynomial, h^i(x) = h''(x)/2 and
  // (h^i)'(x) = h'''(x)/6 reduce to |a'|^2 and Re(a'' conj a') over |a_n|^2.
  // Otherwise from the real factors (t - w_j)(t - conj w_j).
  double h = 1.0;
  double dh = 0.0;
  if (!rs.polynomial.empty()) {
    const auto jet = polynomial_jet(rs.polynomial, Complex(x, 0.0));
    const double lead = std::norm(rs.polynomial.back());
    h = std::norm(jet[1]) / lead;
    dh = std::real(jet[2] * std::conj(jet[1])) / lead;
  }
  for (std::size_t j = 0; j < rs.roots.size() && rs.polynomial.empty(); ++j) {
    if (j == index) continue;
    const auto& r = rs.roots[j];
    auto multiply = [&](Complex w) {
      const double f = std::norm(x - w);  // (x - a)^2 + b^2
      const double df = 2.0 * (x - w.real());
      dh = dh * f + h * df;
      h *= f;
    };
    if (r.members.empty()) {
      for (int k = 0; k < r.multiplicity; ++k) multiply(r.omega);
    } else {
      for (const Complex& w : r.members) multiply(w);
    }
  }

  // g~_m and g~_m' at x.
  const auto series = g_tilde_series(Complex(x, 0.0), m_max, 2);
  std::vector<double> e(static_cast<std::size_t>(m_max) + 1);
  for (std::size_t m = 0; m < e.size(); ++m) {
    const double g = series[m][0].real();
    const double dg = series[m][1].real();
    e[m] = (dg * h - dh * g) / (h * h);
  }
  return e;
}

std::vector<double> e_repeated_sequence(const RootSet& rs, std::size_t index, int m_max) {
  const Root& root = checked_root(rs, index);
  if (root.multiplicity < 2)
    throw Error(ErrorCode::WrongClassification, "e_repeated needs a root of multiplicity > 1");
  const Complex z = root.omega;
  const int n = root.multiplicity;
  const bool on_axis = std::abs(z.imag()) < rs.real_class_tol;
  const auto pole_order = static_cast<std::size_t>(on_axis ? 2 * n : n);
  if (on_axis && z.real() >= 0.0 && z.real() <= 1.0)
    throw Error(ErrorCode::OnBoundary, "repeated real root inside [0, 1]: point on curve");
  if (auto e = cluster_by_contour(rs, index, m_max)) return *e;

  // The merged roots sit at z + d_j with tiny d_j. Around z,
  //   1 / prod_j (w - z - d_j) = sum_k s_k (w - z)^{-order-k},
  // with s_k the complete homogeneous symmetric polynomials of the d_j, so the
  // residue picks up s_k times Taylor coefficient order-1+k. Only the
  // symmetric functions enter, and those are well conditioned even when the
  // individual roots of a near-multiple cluster are not.
  std::vector<Complex> spread;
  for (const Complex& r : root.members) {
    spread.push_back(r - z);
    if (on_axis) spread.push_back(std::conj(r) - z);
  }
  constexpr std::size_t spread_terms = 4;
  Taylor s(spread_terms + 1, 0.0);
  s[0] = 1.0;
  for (const Complex& d : spread) {
    for (std::size_t k = 1; k < s.size(); ++k) s[k] += d * s[k - 1];
  }
  const std::size_t len = pole_order + spread_terms;

  // q = h / (w - z)^order: the remaining factors, as a Taylor series at z.
  const Taylor w = identity_series(z, len);
  Taylor q(len, 0.0);
  q[0] = 1.0;
  auto times_linear = [&](Complex root_j, int times) {
    const Taylor f = add_scalar(w, -root_j);
    for (int k = 0; k < times; ++k) q = mul(q, f);
  };
  if (!on_axis) {
    if (root.members.empty()) {
      times_linear(std::conj(z), n);
    } else {
      for (const Complex& r : root.members) times_linear(std::conj(r), 1);
    }
  }
  for (std::size_t j = 0; j < rs.roots.size(); ++j) {
    if (j == index) continue;
    const Root& other = rs.roots[j];
    if (other.members.empty()) {
      times_linear(other.omega, other.multiplicity);
      times_linear(std::conj(other.omega), other.multiplicity);
    } else {
      for (const Complex& r : other.members) {
        times_linear(r, 1);
        times_linear(std::conj(r), 1);
      }
    }
  }
  const Taylor qinv = inverse(q);

  const auto g = g_tilde_series(on_axis ? Complex(z.real(), 0.0) : z, m_max, len);
  std::vector<double> e(static_cast<std::size_t>(m_max) + 1);
  for (std::size_t m = 0; m < e.size(); ++m) {
    const Taylor prod = mul(g[m], qinv);
    Complex res = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) res += s[k] * prod[pole_order - 1 + k];
    e[m] = on_axis ? res.real() : 2.0 * res.real();
  }
  return e;
}

double e_repeated(const RootSet& rs, std::size_t index, int m) {
  return e_repeated_sequence(rs, index, m).back();
}

std::vector<double> group_contribution(const RootSet& rs, std::size_t index, int m_max) {
  switch (checked_root(rs, index).cls) {
    case RootClass::General: return e_sequence(rs, index, m_max);
    case RootClass::Real: return e_sequence_real(rs, index, m_max);
    case RootClass::Repeated: return e_repeated_sequence(rs, index, m_max);
  }
  throw Error(ErrorCode::WrongClassification, "unknown root class");
}

std::vector<double> f_kernel(const RootSet& rs, int m_max) {
  if (m_max < 0) throw Error(ErrorCode::InvalidArgument, "m_max must be >= 0");
  std::vector<double> f(static_cast<std::size_t>(m_max) + 1, 0.0);
  for (std::size_t i = 0; i < rs.roots.size(); ++i) {
    const auto e = group_contribution(rs, i, m_max);
    for (std::size_t m = 0; m < f.size(); ++m) f[m] += e[m];
  }
  for (auto& v : f) v /= rs.normalization;
  return f;
}

std::vector<double> f_kernel(const Curve& curve, const Vec2& eta, int m_max, const RootOptions& opts) {
  return f_kernel(complex_roots(curve, eta, opts), m_max);
}

}  // namespace pgc
