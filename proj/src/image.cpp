#include "pgc/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pgc {

Image::Image(int w, int h) : width(w), height(h), rgba(4 * static_cast<std::size_t>(w) * h, 0) {
  if (w <= 0 || h <= 0) throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
}

Image read_png(const std::filesystem::path& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str()))
    throw Error(ErrorCode::Io, "cannot read PNG " + path.string() + ": " + img.message);
  img.format = PNG_FORMAT_RGBA;
  Image out(static_cast<int>(img.width), static_cast<int>(img.height));
  if (!png_image_finish_read(&img, nullptr, out.rgba.data(), 0, nullptr)) {
    png_image_free(&img);
    throw Error(ErrorCode::Io, "cannot decode PNG " + path.string() + ": " + img.message);
  }
  return out;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = PNG_FORMAT_RGBA;
  if (!png_image_write_to_file(&img, path.c_str(), 0, image.rgba.data(), 0, nullptr))
    throw Error(ErrorCode::Io, "cannot write PNG " + path.string() + ": " + img.message);
}

Vec2 pixel_to_cage(double i, double j, int height) { return {i + 0.5, height - j - 0.5}; }

Vec2 cage_to_pixel(const Vec2& p, int height) { return {p.x - 0.5, height - p.y - 0.5}; }

std::array<double, 4> sample_bilinear(const Image& image, const Vec2& cage_point) {
  const Vec2 q = cage_to_pixel(cage_point, image.height);
  const double x = std::clamp(q.x, 0.0, image.width - 1.0);
  const double y = std::clamp(q.y, 0.0, image.height - 1.0);
  const int x0 = std::min(static_cast<int>(x), image.width - 1), y0 = std::min(static_cast<int>(y), image.height - 1);
  const int x1 = std::min(x0 + 1, image.width - 1), y1 = std::min(y0 + 1, image.height - 1);
  const double fx = x - x0, fy = y - y0;
  std::array<double, 4> out{};
  for (int c = 0; c < 4; ++c) {
    const double top = (1 - fx) * image.pixel(x0, y0)[c] + fx * image.pixel(x1, y0)[c];
    const double bottom = (1 - fx) * image.pixel(x0, y1)[c] + fx * image.pixel(x1, y1)[c];
    out[static_cast<std::size_t>(c)] = (1 - fy) * top + fy * bottom;
  }
  return out;
}

Image render_warp(const Image& source, const Lattice& lattice, std::span<const Vec2> deformed, int out_width,
                  int out_height) {
  if (deformed.size() != lattice.points.size())
    throw Error(ErrorCode::ShapeMismatch, "deformed grid does not match the lattice");
  Image out(out_width, out_height);
  for (const auto& tri : lattice.triangles) {
    Vec2 d[3], r[3];
    bool finite = true;
    for (int k = 0; k < 3; ++k) {
      d[k] = cage_to_pixel(deformed[tri[static_cast<std::size_t>(k)]], out_height);
      r[k] = lattice.points[tri[static_cast<std::size_t>(k)]];
      finite &= d[k].finite();
    }
    if (!finite) continue;
    const double area = cross(d[1] - d[0], d[2] - d[0]);
    if (std::abs(area) < 1e-14) continue;
    const int x_lo = std::max(0, static_cast<int>(std::ceil(std::min({d[0].x, d[1].x, d[2].x}))));
    const int x_hi = std::min(out_width - 1, static_cast<int>(std::floor(std::max({d[0].x, d[1].x, d[2].x}))));
    const int y_lo = std::max(0, static_cast<int>(std::ceil(std::min({d[0].y, d[1].y, d[2].y}))));
    const int y_hi = std::min(out_height - 1, static_cast<int>(std::floor(std::max({d[0].y, d[1].y, d[2].y}))));
    constexpr double slack = -1e-9;
    for (int y = y_lo; y <= y_hi; ++y)
      for (int x = x_lo; x <= x_hi; ++x) {
        const Vec2 p{static_cast<double>(x), static_cast<double>(y)};
        const double b0 = cross(d[1] - p, d[2] - p) / area;
        const double b1 = cross(d[2] - p, d[0] - p) / area;
        const double b2 = 1.0 - b0 - b1;
        if (b0 < slack || b1 < slack || b2 < slack) continue;
        const auto s = sample_bilinear(source, r[0] * b0 + r[1] * b1 + r[2] * b2);
        auto* px = out.pixel(x, y);
        for (int c = 0; c < 4; ++c)
          px[c] = static_cast<std::uint8_t>(std::clamp(std::lround(s[static_cast<std::size_t>(c)]), 0L, 255L));
      }
  }
  return out;
}

Image render_heatmap(std::span<const double> values, int resolution) {
  if (values.size() != static_cast<std::size_t>(resolution) * resolution)
    throw Error(ErrorCode::ShapeMismatch, "heatmap values do not match the resolution");
  double scale = 0.0;
  for (double v : values)
    if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
  Image out(resolution, resolution);
  for (int j = 0; j < resolution; ++j)
    for (int i = 0; i < resolution; ++i) {
      // Lattice row j counts up from the bottom; image rows count down.
      const double v = values[static_cast<std::size_t>(j) * resolution + i];
      auto* px = out.pixel(i, resolution - 1 - j);
      if (!std::isfinite(v)) continue;
      const double s = scale > 0.0 ? std::clamp(v / scale, -1.0, 1.0) : 0.0;
      const double fade = 1.0 - std::abs(s);
      const auto level = static_cast<std::uint8_t>(std::lround(255.0 * fade));
      px[0] = s > 0 ? 255 : level;
      px[1] = level;
      px[2] = s < 0 ? 255 : level;
      px[3] = 255;
    }
  return out;
}

double psnr(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height) throw Error(ErrorCode::ShapeMismatch, "image sizes differ");
  double sum = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x) {
      const auto *p = a.pixel(x, y), *q = b.pixel(x, y);
      if (p[3] == 0 || q[3] == 0) continue;
      for (int c = 0; c < 3; ++c) {
        const double d = double(p[c]) - double(q[c]);
        sum += d * d;
      }
      count += 3;
    }
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "no overlapping opaque pixels");
  if (sum == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / (sum / count));
}

}  // namespace pgc
