#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pgc/deformer.hpp"
#include "pgc/vec2.hpp"

namespace pgc {

/// 8-bit RGBA raster, rows top to bottom.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;

  Image() = default;
  Image(int w, int h);

  std::uint8_t* pixel(int x, int y) { return rgba.data() + 4 * (static_cast<std::size_t>(y) * width + x); }
  const std::uint8_t* pixel(int x, int y) const {
    return rgba.data() + 4 * (static_cast<std::size_t>(y) * width + x);
  }
};

/// Throws Error(Io) if the file cannot be read or decoded.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& image);

// Cage space for images is pixel units with y pointing up: the center of
// pixel (i, j) sits at (i + 0.5, height - j - 0.5).
Vec2 pixel_to_cage(double i, double j, int height);
Vec2 cage_to_pixel(const Vec2& p, int height);

/// Bilinear sample at a cage-space position, clamped at the image border.
std::array<double, 4> sample_bilinear(const Image& image, const Vec2& cage_point);

/// Texture-maps the lattice triangles from their rest positions to the
/// deformed ones. Pixels not covered by any triangle stay transparent.
Image render_warp(const Image& source, const Lattice& lattice, std::span<const Vec2> deformed,
                  int out_width, int out_height);

/// Signed blue-white-red heatmap of a res x res lattice of values; NaN
/// entries (points outside the cage) are transparent. Values are scaled by
/// the largest magnitude so that zero is white.
Image render_heatmap(std::span<const double> values, int resolution);

/// Peak signal-to-noise ratio over the RGB channels of pixels where both
/// images are opaque. Infinity for identical pixels.
double psnr(const Image& a, const Image& b);

}  // namespace pgc
