#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "pgc/cage_io.hpp"
#include "pgc/error.hpp"
#include "pgc/image.hpp"
#include "test_support.hpp"

using namespace pgc;
using namespace pgc::testing;

namespace {

const std::filesystem::path kFixtures = PGC_FIXTURES;

Image gradient_image(int w, int h) {
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      auto* p = img.pixel(x, y);
      p[0] = static_cast<std::uint8_t>(x * 255 / (w - 1));
      p[1] = static_cast<std::uint8_t>(y * 255 / (h - 1));
      p[2] = static_cast<std::uint8_t>((x * 7 + y * 13) % 256);
      p[3] = 255;
    }
  return img;
}

Cage translate(const Cage& cage, Vec2 d) {
  Cage out = cage;
  for (auto& c : out.curves) {
    auto coeffs = c.coefficients();
    coeffs[0] += d;
    c = Curve(coeffs);
  }
  return out;
}

}  // namespace

TEST_CASE("png round trip") {
  const Image img = gradient_image(37, 21);
  const auto path = std::filesystem::temp_directory_path() / "pgc_roundtrip.png";
  write_png(path, img);
  const Image back = read_png(path);
  CHECK(back.width == 37);
  CHECK(back.height == 21);
  CHECK(back.rgba == img.rgba);
  std::filesystem::remove(path);
}

TEST_CASE("unreadable images are I/O errors") {
  CHECK_THROWS_AS(read_png("/nonexistent.png"), Error);
  try {
    read_png(kFixtures / "square.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("pixel and cage coordinates are inverse") {
  for (double i : {0.0, 3.5, 99.0})
    for (double j : {0.0, 10.25, 63.0}) {
      const Vec2 p = pixel_to_cage(i, j, 64);
      const Vec2 q = cage_to_pixel(p, 64);
      CHECK(q.x == doctest::Approx(i));
      CHECK(q.y == doctest::Approx(j));
    }
  CHECK(pixel_to_cage(0, 0, 64) == Vec2{0.5, 63.5});
}

TEST_CASE("bilinear sampling hits pixel centers and interpolates between them") {
  const Image img = gradient_image(16, 16);
  const auto at = sample_bilinear(img, pixel_to_cage(5, 7, 16));
  for (int ch = 0; ch < 4; ++ch) CHECK(at[ch] == img.pixel(5, 7)[ch]);
  const auto mid = sample_bilinear(img, pixel_to_cage(5.5, 7, 16));
  CHECK(mid[0] == doctest::Approx(0.5 * (img.pixel(5, 7)[0] + img.pixel(6, 7)[0])));
}

TEST_CASE("psnr") {
  const Image a = gradient_image(20, 20);
  CHECK(std::isinf(psnr(a, a)));
  Image b = a;
  b.pixel(3, 3)[0] ^= 0x10;
  const double expected = 10.0 * std::log10(255.0 * 255.0 / (16.0 * 16.0 / (3.0 * 400.0)));
  CHECK(psnr(a, b) == doctest::Approx(expected));
  b.pixel(3, 3)[3] = 0;  // transparent pixels are ignored
  CHECK(std::isinf(psnr(a, b)));
}

TEST_CASE("identity warp keeps the image above 40 dB") {
  const Cage cage = load_cage(kFixtures / "cubic8.json");
  const Image src = read_png(kFixtures / "checker.png");
  const auto warp = warp_grid(cage, cage, 256, 3);
  const Image out = render_warp(src, warp.lattice, warp.deformed, src.width, src.height);
  const double q = psnr(src, out);
  MESSAGE("identity warp PSNR " << q << " dB");
  CHECK(q > 40.0);

  // Most of the cage interior is covered.
  int opaque = 0;
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) opaque += out.pixel(x, y)[3] == 255;
  CHECK(opaque > 0.85 * 232 * 232);
}

TEST_CASE("translated cage shifts the image") {
  const Cage cage = load_cage(kFixtures / "cubic8.json");
  const Image src = read_png(kFixtures / "checker.png");
  const Vec2 shift{12, -7};  // y up: 7 pixels down in the image
  const auto warp = warp_grid(cage, translate(cage, shift), 256, 3);
  const Image out = render_warp(src, warp.lattice, warp.deformed, src.width, src.height);
  long compared = 0, mismatched = 0;
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) {
      const int sx = x - 12, sy = y - 7;
      if (sx < 0 || sy < 0 || out.pixel(x, y)[3] != 255) continue;
      ++compared;
      for (int ch = 0; ch < 3; ++ch) mismatched += std::abs(out.pixel(x, y)[ch] - src.pixel(sx, sy)[ch]) > 2;
    }
  CHECK(compared > 40000);
  CHECK(mismatched < compared / 100);
}

TEST_CASE("bent fixture warps without NaN") {
  const Cage cage = load_cage(kFixtures / "cubic8.json");
  Cage bent = load_cage(kFixtures / "cubic8_bent.json");
  snap_joints(bent, 1e-6);
  const auto warp = warp_grid(cage, bent, 64, 3);
  for (const auto& p : warp.deformed) CHECK(p.finite());
}

TEST_CASE("heatmap colors") {
  const double nan = std::nan("");
  const std::vector<double> values{-1.0, 0.0, 1.0, nan};
  const Image img = render_heatmap(values, 2);
  REQUIRE(img.width == 2);
  // Lattice row 0 is the bottom image row.
  const auto* neg = img.pixel(0, 1);
  const auto* zero = img.pixel(1, 1);
  const auto* pos = img.pixel(0, 0);
  const auto* none = img.pixel(1, 0);
  CHECK(neg[2] > neg[0]);
  CHECK((zero[0] == 255 && zero[1] == 255 && zero[2] == 255 && zero[3] == 255));
  CHECK(pos[0] > pos[2]);
  CHECK(none[3] == 0);

  const Image flat = render_heatmap(std::vector<double>(4, 0.0), 2);
  for (int i = 0; i < 4; ++i) CHECK(flat.rgba[4 * i] == 255);
}

TEST_CASE("field rows rebuild the identity at sampled lattice points") {
  const Cage cage = cubic_square_cage();
  const auto lattice = make_lattice(cage, 40);
  const auto field = build_field(cage, lattice.points, 3);
  Rng rng(11);
  for (int s = 0; s < 100; ++s) {
    const auto p = static_cast<std::size_t>(rng() % lattice.points.size());
    Vec2 sum;
    for (std::size_t k = 0; k < cage.size(); ++k) {
      const auto phi = field.phi(p, k);
      const auto psi = field.psi(p, k);
      CHECK(psi[0] == 0.0);
      for (int m = 0; m <= cage[k].order(); ++m)
        sum += phi[std::size_t(m)] * cage[k][std::size_t(m)] + psi[std::size_t(m)] * perp(cage[k][std::size_t(m)]);
    }
    CHECK(distance(sum, lattice.points[p]) < 1e-9);
  }
}

TEST_CASE("coordinate fields are smooth away from their curve") {
  // Central differences at two step sizes agree, so the gradient is well
  // resolved and bounded.
  const Cage cage = cubic_square_cage();
  const Vec2 center{0.5, 0.5};
  const double h = 1e-3;
  for (int i = 0; i < 12; ++i) {
    const double a = 0.5 * i;
    const Vec2 p = center + 0.3 * Vec2{std::cos(a), std::sin(a)};
    const Vec2 d{h, 0};
    const std::vector<Vec2> pts{p - d, p + d, p - 0.5 * d, p + 0.5 * d};
    const auto field = build_field(cage, pts, 4);
    for (std::size_t k = 0; k < cage.size(); ++k)
      for (std::size_t m = 0; m <= 4; ++m) {
        const double g1 = (field.phi(1, k)[m] - field.phi(0, k)[m]) / (2 * h);
        const double g2 = (field.phi(3, k)[m] - field.phi(2, k)[m]) / h;
        CHECK(std::abs(g1) < 50.0);
        CHECK(std::abs(g1 - g2) < 1e-5 * (1.0 + std::abs(g1)));
      }
  }
}
