#include "pgc/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "pgc/error.hpp"

namespace pgc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

Complex horner(std::span<const Complex> a, Complex w) {
  Complex r = a.back();
  for (auto k = a.size() - 1; k-- > 0;) r = r * w + a[k];
  return r;
}

// p(w) and p'(w) together.
std::pair<Complex, Complex> horner_with_derivative(std::span<const Complex> a, Complex w) {
  Complex p = a.back();
  Complex dp = 0.0;
  for (auto k = a.size() - 1; k-- > 0;) {
    dp = dp * w + p;
    p = p * w + a[k];
  }
  return {p, dp};
}

double residual_scale(std::span<const Complex> a, Complex w) {
  const double r = std::abs(w);
  double s = 0.0;
  double pw = 1.0;
  for (const auto& c : a) {
    s += std::abs(c) * pw;
    pw *= r;
  }
  return s;
}

std::vector<Complex> quadratic_roots(Complex a0, Complex a1, Complex a2) {
  const Complex disc = std::sqrt(a1 * a1 - 4.0 * a2 * a0);
  // Pick the sign that avoids cancellation in a1 + disc.
  const Complex s = (std::real(std::conj(a1) * disc) >= 0.0) ? disc : -disc;
  const Complex q = -0.5 * (a1 + s);
  if (q == Complex(0.0)) return {Complex(0.0), Complex(0.0)};
  return {q / a2, a0 / q};
}

std::vector<Complex> aberth(std::span<const Complex> a) {
  const int n = static_cast<int>(a.size()) - 1;
  // Initial guesses on a circle around the root centroid.
  const Complex center = -a[static_cast<std::size_t>(n - 1)] / (static_cast<double>(n) * a.back());
  double radius = std::pow(std::abs(horner(a, center) / a.back()), 1.0 / n);
  if (!(radius > 0.0) || !std::isfinite(radius)) radius = 1.0;
  std::vector<Complex> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n + 0.4;
    z[static_cast<std::size_t>(k)] = center + radius * Complex(std::cos(theta), std::sin(theta));
  }

  std::vector<bool> done(z.size(), false);
  for (int iter = 0; iter < 1000; ++iter) {
    bool all_done = true;
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (done[i]) continue;
      const auto [p, dp] = horner_with_derivative(a, z[i]);
      if (p == Complex(0.0)) {
        done[i] = true;
        continue;
      }
      const Complex ratio = p / dp;
      Complex sum = 0.0;
      for (std::size_t j = 0; j < z.size(); ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      Complex step = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) step = ratio;
      z[i] -= step;
      if (std::abs(step) <= 4.0 * kEps * std::abs(z[i])) done[i] = true;
      else all_done = false;
    }
    if (all_done) break;
  }
  return z;
}

}  // namespace

std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs, double residual_tol) {
  if (coeffs.size() < 2 || coeffs.back() == Complex(0.0))
    throw Error(ErrorCode::InvalidArgument, "polynomial_roots: need degree >= 1 with nonzero leading coefficient");
  std::vector<Complex> roots;
  switch (coeffs.size()) {
    case 2: roots = {-coeffs[0] / coeffs[1]}; break;
    case 3: roots = quadratic_roots(coeffs[0], coeffs[1], coeffs[2]); break;
    default: roots = aberth(coeffs); break;
  }

  for (auto& w : roots) {
    const auto [p, dp] = horner_with_derivative(coeffs, w);
    if (dp != Complex(0.0)) {
      const Complex polished = w - p / dp;
      if (std::abs(horner(coeffs, polished)) < std::abs(p)) w = polished;
    }
    const double res = std::abs(horner(coeffs, w));
    if (!(res <= residual_tol * residual_scale(coeffs, w))) {
      std::ostringstream os;
      os << "root " << w << " has residual " << res;
      throw RootFindingError(os.str(), {coeffs.begin(), coeffs.end()});
    }
  }
  return roots;
}

const char* to_string(RootClass c) {
  switch (c) {
    case RootClass::General: return "general";
    case RootClass::Real: return "real";
    case RootClass::Repeated: return "repeated";
  }
  return "unknown";
}

int RootSet::total_multiplicity() const {
  return std::accumulate(roots.begin(), roots.end(), 0,
                         [](int s, const Root& r) { return s + r.multiplicity; });
}

RootSet complex_roots(const Curve& input, const Vec2& eta, const RootOptions& opts) {
  const Curve curve = input.normalized();
  const int n = curve.order();

  // a(t) = (eta_x + i eta_y) - sum_k t^k (c_kx + i c_ky)
  std::vector<Complex> a(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= n; ++k) a[static_cast<std::size_t>(k)] = -to_complex(curve[static_cast<std::size_t>(k)]);
  a[0] += to_complex(eta);

  if (std::abs(a[0]) <= opts.on_curve_tol || distance(curve.end(), eta) <= opts.on_curve_tol)
    throw Error(ErrorCode::EndpointSingularity, "query point coincides with a curve endpoint");

  auto raw = polynomial_roots(a, opts.residual_tol);

  for (const auto& w : raw) {
    const double t = std::clamp(w.real(), 0.0, 1.0);
    if (std::abs(w.real() - t) <= opts.real_class_tol &&
        distance(curve.evaluate(t), eta) <= opts.on_curve_tol)
      throw Error(ErrorCode::OnBoundary, "query point lies on the curve");
  }

  // Sort, then merge roots closer than cluster_eps (transitively).
  std::sort(raw.begin(), raw.end(), [](const Complex& l, const Complex& r) {
    return l.real() != r.real() ? l.real() < r.real() : l.imag() < r.imag();
  });
  std::vector<int> group(raw.size());
  std::iota(group.begin(), group.end(), 0);
  auto find = [&](int i) {
    while (group[static_cast<std::size_t>(i)] != i) i = group[static_cast<std::size_t>(i)];
    return i;
  };
  for (std::size_t i = 0; i < raw.size(); ++i)
    for (std::size_t j = i + 1; j < raw.size(); ++j)
      if (std::abs(raw[i] - raw[j]) < opts.cluster_eps)
        group[static_cast<std::size_t>(find(static_cast<int>(j)))] = find(static_cast<int>(i));

  RootSet rs;
  rs.order = n;
  rs.real_class_tol = opts.real_class_tol;
  rs.polynomial = a;
  rs.normalization = 2.0 * std::numbers::pi * curve[static_cast<std::size_t>(n)].squared_norm();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (find(static_cast<int>(i)) != static_cast<int>(i)) continue;
    Root r;
    Complex sum = 0.0;
    int count = 0;
    for (std::size_t j = 0; j < raw.size(); ++j)
      if (find(static_cast<int>(j)) == static_cast<int>(i)) {
        sum += raw[j];
        ++count;
        r.members.push_back(raw[j]);
      }
    r.omega = sum / static_cast<double>(count);
    r.multiplicity = count;
    if (count > 1) r.cls = RootClass::Repeated;
    else if (std::abs(r.omega.imag()) < opts.real_class_tol) r.cls = RootClass::Real;
    else r.cls = RootClass::General;
    if (r.cls == RootClass::Real) r.omega = r.omega.real();
    if (r.cls != RootClass::Repeated) r.members.clear();
    rs.roots.push_back(r);
  }
  return rs;
}

Complex other_roots_factor(const RootSet& rs, std::size_t index, Complex w) {
  Complex h = 1.0;
  for (std::size_t j = 0; j < rs.roots.size(); ++j) {
    if (j == index) continue;
    const auto& r = rs.roots[j];
    if (!r.members.empty()) {
      for (const Complex& m : r.members) h *= (w - m) * (w - std::conj(m));
      continue;
    }
    const Complex pair = (w - r.omega) * (w - std::conj(r.omega));
    for (int k = 0; k < r.multiplicity; ++k) h *= pair;
  }
  return h;
}

}  // namespace pgc
