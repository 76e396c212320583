#include "pgc/deformer.hpp"

#include "pgc/kernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <mutex>
#include <thread>

namespace pgc {

static_assert(std::endian::native == std::endian::little, "field format assumes a little-endian host");

namespace {

template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    body(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk, end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

}  // namespace

CoordinateField::CoordinateField(std::shared_ptr<const Storage> storage, int target_order)
    : data_(std::move(storage)), target_order_(target_order) {
  if (!data_) throw Error(ErrorCode::InvalidArgument, "field storage is null");
  if (target_order < 1) throw Error(ErrorCode::InvalidArgument, "target order must be >= 1");
  if (target_order > data_->ceiling)
    throw Error(ErrorCode::NeedsRecompute, "target order " + std::to_string(target_order) +
                                               " exceeds the precomputed ceiling " +
                                               std::to_string(data_->ceiling));
  const std::size_t expected =
      data_->points.size() * data_->source_orders.size() * static_cast<std::size_t>(data_->ceiling + 1);
  if (data_->phi.size() != expected || data_->psi.size() != expected)
    throw Error(ErrorCode::ShapeMismatch, "field arrays do not match points x curves x (ceiling + 1)");
}

std::span<const Vec2> CoordinateField::points() const {
  if (!data_) return {};
  return data_->points;
}

int CoordinateField::source_order(std::size_t curve) const {
  return static_cast<int>(data_->source_orders.at(curve));
}

std::uint64_t CoordinateField::signature() const {
  std::uint64_t h = cage_hash();
  const std::uint32_t nt = static_cast<std::uint32_t>(target_order_);
  fnv(h, &nt, sizeof nt);
  return h;
}

std::size_t CoordinateField::offset(std::size_t point, std::size_t curve) const {
  if (point >= size() || curve >= curve_count()) throw Error(ErrorCode::InvalidArgument, "field index out of range");
  return (point * curve_count() + curve) * static_cast<std::size_t>(data_->ceiling + 1);
}

std::span<const double> CoordinateField::phi(std::size_t point, std::size_t curve) const {
  return std::span(data_->phi).subspan(offset(point, curve), static_cast<std::size_t>(target_order_) + 1);
}

std::span<const double> CoordinateField::psi(std::size_t point, std::size_t curve) const {
  return std::span(data_->psi).subspan(offset(point, curve), static_cast<std::size_t>(target_order_) + 1);
}

CurveCoords CoordinateField::coords(std::size_t point, std::size_t curve) const {
  const auto f = phi(point, curve), s = psi(point, curve);
  return {{f.begin(), f.end()}, {s.begin(), s.end()}, source_order(curve), target_order_};
}

CoordinateField CoordinateField::with_target_order(int target_order) const {
  if (!data_) throw Error(ErrorCode::InvalidArgument, "empty field");
  return CoordinateField(data_, target_order);
}

std::uint64_t cage_hash(const Cage& cage) {
  std::uint64_t h = kFnvOffset;
  const std::uint64_t n = cage.size();
  fnv(h, &n, sizeof n);
  for (const auto& c : cage.curves) {
    const std::uint32_t order = static_cast<std::uint32_t>(c.order());
    fnv(h, &order, sizeof order);
    for (const auto& p : c.coefficients()) {
      fnv(h, &p.x, sizeof p.x);
      fnv(h, &p.y, sizeof p.y);
    }
  }
  return h;
}

DeformedCage make_deformed(const Cage& cage, int target_order, double closure_tol) {
  DeformedCage out;
  for (std::size_t k = 0; k < cage.size(); ++k) {
    const Curve& c = cage[k];
    if (c.order() > target_order)
      throw Error(ErrorCode::ShapeMismatch, "curve " + std::to_string(k) + " has order " +
                                                std::to_string(c.order()) + " above the target order " +
                                                std::to_string(target_order));
    out.curves.push_back(elevate_degree(c, target_order));
  }
  for (std::size_t k = 0; k < out.curves.size(); ++k) {
    const double gap = distance(out.curves[k].end(), out.curves[(k + 1) % out.curves.size()].start());
    if (gap > closure_tol)
      throw Error(ErrorCode::InvalidArgument,
                  "deformed cage is open after curve " + std::to_string(k) + " (gap " + std::to_string(gap) + ")");
  }
  return out;
}

namespace {

constexpr int kFilterSamples = 256;

// Upper bound on how far a curve strays from its sampled chords.
double chord_error(const Curve& c, int samples) {
  double second = 0.0;
  for (int k = 2; k <= c.order(); ++k) second += k * (k - 1) * c[static_cast<std::size_t>(k)].norm();
  return second / (8.0 * samples * samples);
}

// Distance to the curve itself: best sample, then Newton on (c - p) . c' = 0.
double exact_distance(const Curve& c, const Vec2& p) {
  constexpr int n = 64;
  double best_t = 0.0, best = INFINITY;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double d = distance(c.evaluate(t), p);
    if (d < best) best = d, best_t = t;
  }
  double t = best_t;
  for (int it = 0; it < 20; ++it) {
    const Vec2 r = c.evaluate(t) - p, dc = c.derivative(t);
    Vec2 ddc;
    for (int k = 2; k <= c.order(); ++k)
      ddc += c[static_cast<std::size_t>(k)] * (k * (k - 1) * std::pow(t, k - 2));
    const double g = dot(r, dc), dg = dot(dc, dc) + dot(r, ddc);
    if (!(dg > 0.0)) break;
    t = std::clamp(t - g / dg, 0.0, 1.0);
  }
  return std::min(best, distance(c.evaluate(t), p));
}

// Sum over curves of Phi_0: the double-layer potential of the constant 1,
// which is 1 inside the cage and 0 outside.
double harmonic_indicator(const Cage& cage, const Vec2& p) {
  double sum = 0.0;
  for (const auto& raw : cage.curves) {
    const Curve c = raw.normalized();
    const auto ab = alpha_beta(c, p);
    const auto f = f_kernel(c, p, static_cast<int>(ab.alpha.size()) - 1);
    for (std::size_t i = 0; i < ab.alpha.size(); ++i) sum += ab.alpha[i] * f[i];
  }
  return sum;
}

}  // namespace

PointFilter filter_interior(const Cage& cage, std::span<const Vec2> points, double margin) {
  // Per-curve sampled chains with their boxes, so that far curves are skipped.
  struct Chain {
    std::vector<Vec2> pts;
    BoundingBox box;
  };
  std::vector<Chain> chains;
  double band = 0.0;
  for (const auto& c : cage.curves) {
    Chain ch;
    ch.box = {{INFINITY, INFINITY}, {-INFINITY, -INFINITY}};
    for (int i = 0; i <= kFilterSamples; ++i) {
      const Vec2 q = c.evaluate(static_cast<double>(i) / kFilterSamples);
      ch.pts.push_back(q);
      ch.box.min = {std::min(ch.box.min.x, q.x), std::min(ch.box.min.y, q.y)};
      ch.box.max = {std::max(ch.box.max.x, q.x), std::max(ch.box.max.y, q.y)};
    }
    chains.push_back(std::move(ch));
    band = std::max(band, chord_error(c, kFilterSamples));
  }
  // Joints that are closed only to rounding still need a segment, or a ray
  // through the joint can slip between two chains.
  for (std::size_t k = 0; k < chains.size(); ++k) {
    const Vec2 next = chains[(k + 1) % chains.size()].pts.front();
    auto& ch = chains[k];
    if (ch.pts.back() == next) continue;
    ch.pts.push_back(next);
    ch.box.min = {std::min(ch.box.min.x, next.x), std::min(ch.box.min.y, next.y)};
    ch.box.max = {std::max(ch.box.max.x, next.x), std::max(ch.box.max.y, next.y)};
  }

  auto polyline_distance = [&](const Vec2& p) {
    double best = INFINITY;
    for (const auto& ch : chains) {
      const double dx = std::max({ch.box.min.x - p.x, 0.0, p.x - ch.box.max.x});
      const double dy = std::max({ch.box.min.y - p.y, 0.0, p.y - ch.box.max.y});
      if (std::hypot(dx, dy) >= best) continue;
      for (std::size_t i = 0; i + 1 < ch.pts.size(); ++i)
        best = std::min(best, segment_distance(p, ch.pts[i], ch.pts[i + 1]));
    }
    return best;
  };
  auto winding = [&](const Vec2& p) {
    int wn = 0;
    for (const auto& ch : chains) {
      if (p.y < ch.box.min.y || p.y > ch.box.max.y) continue;
      for (std::size_t i = 0; i + 1 < ch.pts.size(); ++i) {
        const Vec2& a = ch.pts[i];
        const Vec2& b = ch.pts[i + 1];
        if (a.y <= p.y) {
          if (b.y > p.y && cross(b - a, p - a) > 0) ++wn;
        } else if (b.y <= p.y && cross(b - a, p - a) < 0) {
          --wn;
        }
      }
    }
    return wn;
  };

  PointFilter out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec2& p = points[i];
    bool inside = false;
    if (p.finite()) {
      const double d = polyline_distance(p);
      if (d > margin + band) {
        inside = winding(p) == 1;
      } else {
        // Too close for the samples to decide: use the curves themselves.
        double exact = INFINITY;
        for (const auto& c : cage.curves) exact = std::min(exact, exact_distance(c, p));
        if (exact > margin) {
          try {
            inside = harmonic_indicator(cage, p) > 0.5;
          } catch (const Error&) {
            inside = false;
          }
        }
      }
    }
    if (inside) {
      out.kept.push_back(p);
      out.kept_indices.push_back(i);
    } else {
      out.rejected.push_back(i);
    }
  }
  return out;
}

CoordinateField build_field(const Cage& cage, std::span<const Vec2> points, int target_order,
                            const FieldOptions& options) {
  if (target_order < 1) throw Error(ErrorCode::InvalidArgument, "target order must be >= 1");
  if (cage.empty()) throw Error(ErrorCode::InvalidArgument, "cage has no curves");
  const auto filter = filter_interior(cage, points, options.boundary_margin);
  if (!filter.rejected.empty()) {
    std::ostringstream os;
    os << filter.rejected.size() << " point(s) outside the cage or on its boundary: ";
    for (std::size_t i = 0; i < std::min<std::size_t>(filter.rejected.size(), 20); ++i)
      os << (i ? ", " : "") << filter.rejected[i];
    if (filter.rejected.size() > 20) os << ", ...";
    throw RejectedPointsError(os.str(), filter.rejected);
  }

  auto storage = std::make_shared<CoordinateField::Storage>();
  storage->points.assign(points.begin(), points.end());
  storage->ceiling = std::max(options.ceiling, target_order);
  storage->cage_hash = cage_hash(cage);
  std::vector<Curve> curves;
  for (const auto& c : cage.curves) {
    curves.push_back(c.normalized());
    storage->source_orders.push_back(static_cast<std::uint32_t>(curves.back().order()));
  }
  const std::size_t stride = static_cast<std::size_t>(storage->ceiling + 1);
  const std::size_t total = points.size() * curves.size() * stride;
  storage->phi.resize(total);
  storage->psi.resize(total);

  parallel_for(points.size(), options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      for (std::size_t k = 0; k < curves.size(); ++k) {
        const auto cc = encode_point(curves[k], points[p], storage->ceiling, options.roots);
        const std::size_t at = (p * curves.size() + k) * stride;
        std::copy(cc.phi.begin(), cc.phi.end(), storage->phi.begin() + static_cast<std::ptrdiff_t>(at));
        std::copy(cc.psi.begin(), cc.psi.end(), storage->psi.begin() + static_cast<std::ptrdiff_t>(at));
      }
    }
  });
  return CoordinateField(std::move(storage), target_order);
}

std::vector<Vec2> deform(const CoordinateField& field, const DeformedCage& deformed, unsigned threads) {
  const std::size_t nc = field.curve_count();
  if (deformed.curves.size() != nc)
    throw Error(ErrorCode::ShapeMismatch, "deformed cage has " + std::to_string(deformed.curves.size()) +
                                              " curves, field expects " + std::to_string(nc));
  const int nt = field.target_order();
  for (std::size_t k = 0; k < nc; ++k)
    if (deformed.curves[k].order() != nt)
      throw Error(ErrorCode::ShapeMismatch, "deformed curve " + std::to_string(k) + " has order " +
                                                std::to_string(deformed.curves[k].order()) +
                                                ", field expects target order " + std::to_string(nt));
  std::vector<Vec2> out(field.size());
  if (field.size() == 0) return out;

  // Gather the coefficients and their perpendiculars once.
  std::vector<Vec2> coeff, coeff_perp;
  for (const auto& c : deformed.curves)
    for (const auto& v : c.coefficients()) {
      coeff.push_back(v);
      coeff_perp.push_back(perp(v));
    }
  const auto& s = field.storage();
  const std::size_t stride = static_cast<std::size_t>(s.ceiling + 1);
  const std::size_t terms = static_cast<std::size_t>(nt) + 1;
  parallel_for(field.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      double x = 0.0, y = 0.0;
      for (std::size_t k = 0; k < nc; ++k) {
        const double* phi = s.phi.data() + (p * nc + k) * stride;
        const double* psi = s.psi.data() + (p * nc + k) * stride;
        const Vec2* c = coeff.data() + k * terms;
        const Vec2* cp = coeff_perp.data() + k * terms;
        for (std::size_t m = 0; m < terms; ++m) {
          x += phi[m] * c[m].x + psi[m] * cp[m].x;
          y += phi[m] * c[m].y + psi[m] * cp[m].y;
        }
      }
      out[p] = {x, y};
    }
  });
  return out;
}

CurveCoords to_bezier_coordinates(const CurveCoords& monomial) {
  // c_m = C(n, m) sum_{j <= m} (-1)^(m-j) C(m, j) b_j, so the weight of b_j
  // collects phi_m C(n, m) (-1)^(m-j) C(m, j) over m >= j.
  const int n = monomial.target_order;
  CurveCoords out = monomial;
  for (int j = 0; j <= n; ++j) {
    double phi = 0.0, psi = 0.0;
    for (int m = j; m <= n; ++m) {
      const double w = binomial(n, m) * binomial(m, j) * (((m - j) % 2) ? -1.0 : 1.0);
      phi += w * monomial.phi[static_cast<std::size_t>(m)];
      psi += w * monomial.psi[static_cast<std::size_t>(m)];
    }
    out.phi[static_cast<std::size_t>(j)] = phi;
    out.psi[static_cast<std::size_t>(j)] = psi;
  }
  return out;
}

Lattice make_lattice(const Cage& cage, int resolution, double margin) {
  if (resolution < 2) throw Error(ErrorCode::InvalidArgument, "lattice resolution must be >= 2");
  Lattice lat;
  lat.resolution = resolution;
  lat.box = bounding_box(cage);
  if (!(lat.box.width() > 0.0) || !(lat.box.height() > 0.0))
    throw Error(ErrorCode::InvalidArgument, "cage bounding box is degenerate");

  const auto r = static_cast<std::size_t>(resolution);
  std::vector<Vec2> all;
  all.reserve(r * r);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < r; ++i)
      all.push_back({lat.box.min.x + lat.box.width() * static_cast<double>(i) / (resolution - 1),
                     lat.box.min.y + lat.box.height() * static_cast<double>(j) / (resolution - 1)});
  const auto filter = filter_interior(cage, all, margin);
  std::vector<std::int64_t> index(all.size(), -1);
  for (std::size_t k = 0; k < filter.kept_indices.size(); ++k) {
    const std::size_t g = filter.kept_indices[k];
    index[g] = static_cast<std::int64_t>(k);
    lat.points.push_back(all[g]);
    lat.cells.push_back({static_cast<int>(g % r), static_cast<int>(g / r)});
  }
  for (std::size_t j = 0; j + 1 < r; ++j)
    for (std::size_t i = 0; i + 1 < r; ++i) {
      const auto a = index[j * r + i], b = index[j * r + i + 1];
      const auto c = index[(j + 1) * r + i + 1], d = index[(j + 1) * r + i];
      auto add = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
        if (x >= 0 && y >= 0 && z >= 0)
          lat.triangles.push_back({static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y),
                                   static_cast<std::uint32_t>(z)});
      };
      add(a, b, c);
      add(a, c, d);
    }
  return lat;
}

WarpResult warp_grid(const Cage& cage, const Cage& deformed, int resolution, int target_order,
                     const FieldOptions& options) {
  WarpResult out;
  out.lattice = make_lattice(cage, resolution, options.boundary_margin);
  const auto field = build_field(cage, out.lattice.points, target_order, options);
  out.deformed = deform(field, make_deformed(deformed, target_order), options.threads);
  return out;
}

namespace {

constexpr char kMagic[4] = {'P', 'G', 'C', '1'};

template <class T>
void put(std::vector<std::uint8_t>& out, const T& v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  template <class T>
  void get_array(std::vector<T>& out, std::size_t count) {
    if (count > (bytes_.size() - pos_) / sizeof(T)) throw Error(ErrorCode::Parse, "field file is truncated");
    out.resize(count);
    std::memcpy(out.data(), bytes_.data() + pos_, count * sizeof(T));
    pos_ += count * sizeof(T);
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::Parse, "field file is truncated");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_field(const CoordinateField& field) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  const auto& s = field.storage();
  put(out, static_cast<std::uint64_t>(s.points.size()));
  put(out, static_cast<std::uint64_t>(s.source_orders.size()));
  for (auto o : s.source_orders) put(out, o);
  put(out, static_cast<std::uint32_t>(field.target_order()));
  put(out, static_cast<std::uint32_t>(s.ceiling));
  put(out, s.cage_hash);
  for (const auto& p : s.points) {
    put(out, p.x);
    put(out, p.y);
  }
  for (double v : s.phi) put(out, v);
  for (double v : s.psi) put(out, v);
  return out;
}

CoordinateField deserialize_field(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw Error(ErrorCode::Parse, "not a coordinate field file (bad magic)");
  Reader r(bytes.subspan(4));
  auto s = std::make_shared<CoordinateField::Storage>();
  const auto n_points = r.get<std::uint64_t>();
  const auto n_curves = r.get<std::uint64_t>();
  if (n_curves > (1u << 20)) throw Error(ErrorCode::Parse, "implausible curve count in field file");
  r.get_array(s->source_orders, n_curves);
  const auto target = r.get<std::uint32_t>();
  const auto ceiling = r.get<std::uint32_t>();
  if (ceiling > 64 || target > ceiling) throw Error(ErrorCode::Parse, "implausible orders in field file");
  s->ceiling = static_cast<int>(ceiling);
  s->cage_hash = r.get<std::uint64_t>();
  std::vector<double> coords;
  if (n_points > bytes.size()) throw Error(ErrorCode::Parse, "field file is truncated");
  r.get_array(coords, 2 * n_points);
  for (std::size_t i = 0; i < n_points; ++i) s->points.push_back({coords[2 * i], coords[2 * i + 1]});
  const std::size_t total = n_points * n_curves * (ceiling + 1);
  r.get_array(s->phi, total);
  r.get_array(s->psi, total);
  if (!r.done()) throw Error(ErrorCode::Parse, "trailing bytes after field data");
  return CoordinateField(std::move(s), static_cast<int>(target));
}

void save_field(const std::filesystem::path& path, const CoordinateField& field) {
  const auto bytes = serialize_field(field);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

CoordinateField load_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_field(bytes);
}

}  // namespace pgc
