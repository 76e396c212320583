// Runs the pgc binary end to end through the shell.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pgc/cage_io.hpp"
#include "pgc/deformer.hpp"
#include "pgc/image.hpp"
#include "test_support.hpp"

using namespace pgc;
using namespace pgc::testing;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = PGC_FIXTURES;

struct Run {
  int status;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  Scratch() {
    static int counter = 0;
    dir = fs::temp_directory_path() / ("pgc_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  fs::path operator/(const std::string& name) const { return dir / name; }

  Run pgc(const std::string& args) const {
    const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + PGC_CLI + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                            err.string() + "\"";
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
  }
};

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

void write_points(const fs::path& path, const std::vector<Vec2>& pts) {
  write_text_file(path, points_to_json(pts).dump());
}

Cage shifted(const Cage& cage, Vec2 d) {
  Cage out = cage;
  for (auto& c : out.curves) {
    auto coeffs = c.coefficients();
    coeffs[0] += d;
    c = Curve(coeffs);
  }
  return out;
}

}  // namespace

TEST_CASE("encode: one interior point gives a one-point field") {
  Scratch s;
  write_points(s / "p.json", {{0.5, 0.5}});
  const auto r = s.pgc("encode --cage " + q(kFixtures / "square.json") + " --points " + q(s / "p.json") +
                       " --target-order 1 --out " + q(s / "f.bin"));
  CHECK(r.status == 0);
  const auto field = load_field(s / "f.bin");
  CHECK(field.size() == 1);
  CHECK(field.target_order() == 1);
}

TEST_CASE("encode: outside points are listed and excluded") {
  Scratch s;
  const auto r = s.pgc("encode --cage " + q(kFixtures / "cubic8.json") + " --points " +
                       q(kFixtures / "points.json") + " --target-order 3 --out " + q(s / "f.bin"));
  CHECK(r.status == 0);
  CHECK(r.err.find("point 3") != std::string::npos);
  CHECK(r.err.find("warning") != std::string::npos);
  CHECK(load_field(s / "f.bin").size() == 3);
}

TEST_CASE("encode is byte-for-byte deterministic") {
  Scratch s;
  const std::string args = "encode --cage " + q(kFixtures / "quadratic.json") + " --points ";
  Rng rng(4);
  write_points(s / "p.json", random_interior_points(rng, load_cage(kFixtures / "quadratic.json"), 200, 0.02));
  CHECK(s.pgc(args + q(s / "p.json") + " --target-order 4 --out " + q(s / "a.bin")).status == 0);
  CHECK(s.pgc(args + q(s / "p.json") + " --target-order 4 --out " + q(s / "b.bin")).status == 0);
  CHECK(slurp(s / "a.bin") == slurp(s / "b.bin"));
}

TEST_CASE("encode: invalid cage exits 2, missing files exit 3") {
  Scratch s;
  Cage open = load_cage(kFixtures / "cubic8.json");
  open.curves.pop_back();
  save_cage(s / "open.json", open);
  const auto bad = s.pgc("encode --cage " + q(s / "open.json") + " --points " + q(kFixtures / "points.json") +
                         " --out " + q(s / "f.bin"));
  CHECK(bad.status == 2);
  CHECK(bad.err.find("closure") != std::string::npos);
  CHECK(s.pgc("encode --cage " + q(s / "none.json") + " --points " + q(kFixtures / "points.json") + " --out " +
              q(s / "f.bin"))
            .status == 3);
  CHECK(s.pgc("encode --cage " + q(kFixtures / "square.json") + " --points " + q(kFixtures / "points.json") +
              " --target-order 9 --out " + q(s / "f.bin"))
            .status == 2);
}

TEST_CASE("deform: identity, translation and order mismatch") {
  Scratch s;
  const Cage cage = load_cage(kFixtures / "cubic8.json");
  Rng rng(8);
  const auto pts = random_interior_points(rng, cage, 50, 5.0);
  write_points(s / "p.json", pts);
  REQUIRE(s.pgc("encode --cage " + q(kFixtures / "cubic8.json") + " --points " + q(s / "p.json") +
                " --target-order 3 --out " + q(s / "f.bin"))
              .status == 0);

  SUBCASE("identity") {
    const auto r = s.pgc("deform --coords " + q(s / "f.bin") + " --deformed " + q(kFixtures / "cubic8.json") +
                         " --cage " + q(kFixtures / "cubic8.json") + " --out " + q(s / "out.json"));
    REQUIRE(r.status == 0);
    const auto out = load_points(s / "out.json");
    REQUIRE(out.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(distance(out[i], pts[i]) < 1e-6);
  }
  SUBCASE("translation") {
    save_cage(s / "moved.json", shifted(cage, {30, -4}));
    REQUIRE(s.pgc("deform --coords " + q(s / "f.bin") + " --deformed " + q(s / "moved.json") + " --out " +
                  q(s / "out.json"))
                .status == 0);
    const auto out = load_points(s / "out.json");
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(distance(out[i], pts[i] + Vec2{30, -4}) < 1e-6);
  }
  SUBCASE("order above the encoded target") {
    Cage high;
    for (const auto& c : cage.curves) high.curves.push_back(elevate_degree(c, 4));
    save_cage(s / "high.json", high);
    const auto r = s.pgc("deform --coords " + q(s / "f.bin") + " --deformed " + q(s / "high.json") + " --out " +
                         q(s / "out.json"));
    CHECK(r.status == 2);
    CHECK(r.err.find("n_t = 3") != std::string::npos);
  }
  SUBCASE("wrong rest cage signature") {
    const auto r = s.pgc("deform --coords " + q(s / "f.bin") + " --deformed " + q(kFixtures / "cubic8.json") +
                         " --cage " + q(kFixtures / "cubic8_bent.json") + " --out " + q(s / "out.json"));
    CHECK(r.status == 2);
    CHECK(r.err.find("signature") != std::string::npos);
  }
  SUBCASE("curve count mismatch") {
    const auto r = s.pgc("deform --coords " + q(s / "f.bin") + " --deformed " + q(kFixtures / "square.json") +
                         " --out " + q(s / "out.json"));
    CHECK(r.status == 2);
  }
}

TEST_CASE("warp: identity above 40 dB, unreadable image exits 3") {
  Scratch s;
  const std::string cages = "--cage " + q(kFixtures / "cubic8.json") + " --deformed ";
  const auto r = s.pgc("warp " + cages + q(kFixtures / "cubic8.json") + " --image " +
                       q(kFixtures / "checker.png") + " --res 256 --out " + q(s / "id.png"));
  REQUIRE(r.status == 0);
  const double quality = psnr(read_png(kFixtures / "checker.png"), read_png(s / "id.png"));
  MESSAGE("cli identity warp PSNR " << quality);
  CHECK(quality > 40.0);

  CHECK(s.pgc("warp " + cages + q(kFixtures / "cubic8_bent.json") + " --image " + q(kFixtures / "checker.png") +
              " --res 48 --out " + q(s / "bent.png"))
            .status == 0);
  CHECK(fs::exists(s / "bent.png"));

  CHECK(s.pgc("warp " + cages + q(kFixtures / "cubic8.json") + " --image " + q(s / "missing.png") +
              " --res 32 --out " + q(s / "x.png"))
            .status == 3);
  CHECK(s.pgc("warp " + cages + q(kFixtures / "cubic8.json") + " --image " + q(kFixtures / "checker.png") +
              " --res 1 --out " + q(s / "x.png"))
            .status == 2);
}

TEST_CASE("field: psi with m = 0 is zero everywhere") {
  Scratch s;
  const auto r = s.pgc("field --cage " + q(kFixtures / "quadratic.json") + " --which psi --curve 2 --coeff 0 --res 32"
                       " --out " + q(s / "psi.png"));
  REQUIRE(r.status == 0);
  CHECK(r.out == "min 0 max 0\n");
  const Image img = read_png(s / "psi.png");
  int opaque = 0;
  for (int i = 0; i < img.width * img.height; ++i)
    if (img.rgba[4 * i + 3] == 255) {
      ++opaque;
      CHECK((img.rgba[4 * i] == 255 && img.rgba[4 * i + 1] == 255 && img.rgba[4 * i + 2] == 255));
    }
  CHECK(opaque > 300);
}

TEST_CASE("field: phi ranges and index errors") {
  Scratch s;
  const std::string base = "field --cage " + q(kFixtures / "quadratic.json") + " --which phi --res 24 --out " +
                           q(s / "phi.png");
  const auto r = s.pgc(base + " --curve 0 --coeff 0");
  REQUIRE(r.status == 0);
  double lo = 0, hi = 0;
  std::istringstream(r.out.substr(4)) >> lo;
  std::istringstream(r.out.substr(r.out.find("max") + 4)) >> hi;
  CHECK(lo >= 0.0);
  CHECK(hi <= 1.0);
  CHECK(hi > lo);
  CHECK(s.pgc(base + " --curve 5 --coeff 0").status == 2);
  CHECK(s.pgc(base + " --curve 0 --coeff 9").status == 2);
}

TEST_CASE("check: passes on the quadratic fixture, corrupted alpha fails with a replay file") {
  Scratch s;
  const std::string base = "check --cage " + q(kFixtures / "quadratic.json") + " --samples 50";
  const auto ok = s.pgc(base + " --seed 3");
  CHECK(ok.status == 0);
  for (const char* name : {"kernel", "dirichlet", "neumann", "reproduction"})
    CHECK(ok.out.find(name) != std::string::npos);
  CHECK(s.pgc(base + " --seed 3").out == ok.out);

  const auto bad = s.pgc(base + " --seed 3 --corrupt-alpha --replay " + q(s / "replay.json"));
  CHECK(bad.status == 1);
  const auto replay = read_json_file(s / "replay.json");
  REQUIRE(replay.is_array());
  CHECK(replay.size() >= 1);
  CHECK(replay[0].contains("configuration"));
}
