#include <cmath>
#include <fstream>
#include <set>

#include "doctest.h"
#include "seafloor/error.hpp"
#include "seafloor/geo_grid.hpp"
#include "seafloor/random.hpp"
#include "seafloor/raster_io.hpp"
#include "seafloor/snippet.hpp"
#include "support.hpp"

using namespace seafloor;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("slant_to_ground examples") {
  CHECK(slant_to_ground(26.0, 10.0) == doctest::Approx(24.0));
  CHECK(slant_to_ground(10.0, 10.0) == 0.0);
  CHECK(code_of([] { slant_to_ground(9.0, 10.0); }) == ErrorCode::InsideNadir);
}

TEST_CASE("slant_to_ground is monotone and inverts ground_to_slant") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(1.0, 30.0);
    const double s1 = a + rng.uniform(0.0, 100.0);
    const double s2 = s1 + rng.uniform(1e-6, 10.0);
    CHECK(slant_to_ground(s1, a) < slant_to_ground(s2, a));
    CHECK(ground_to_slant(slant_to_ground(s1, a), a) == doctest::Approx(s1).epsilon(1e-12));
  }
}

TEST_CASE("estimate_altitude") {
  SUBCASE("first return at bin 200") {
    auto img = testing::constant_image(20, 400, 0.5f, 10.0);
    img.altitude.reset();
    CHECK(estimate_altitude(img) == doctest::Approx(10.0));
  }
  SUBCASE("metadata passes through") {
    auto img = testing::constant_image(20, 400, 0.5f, 10.0);
    img.altitude = 12.0;
    CHECK(estimate_altitude(img) == 12.0);
  }
  SUBCASE("all zero image") {
    auto img = testing::constant_image(20, 400, 0.0f, 10.0);
    img.altitude.reset();
    CHECK(code_of([&] { estimate_altitude(img); }) == ErrorCode::NoFirstReturn);
  }
  SUBCASE("single speckle spike is not a first return") {
    auto img = testing::constant_image(21, 400, 0.5f, 10.0);
    img.altitude.reset();
    for (std::size_t p = 0; p < img.pings(); ++p) img.intensities(p, 50) = 0.9f;
    CHECK(estimate_altitude(img) == doctest::Approx(10.0));
  }
}

TEST_CASE("snippet window size") {
  auto img = testing::constant_image(100, 400, 0.5f);
  const SnippetWindow w = snippet_window(img, {3.0, 3.0, true});
  CHECK(w.bins == 60);
  CHECK(w.pings == 30);
  CHECK(code_of([&] { snippet_window(img, {0.0, 3.0, true}); }) == ErrorCode::InvalidParams);
}

TEST_CASE("random snippets are reproducible") {
  auto img = testing::constant_image(300, 800, 0.5f);
  const auto a = extract_snippets(img, {}, RandomSampling{100, 7});
  const auto b = extract_snippets(img, {}, RandomSampling{100, 7});
  REQUIRE(a.size() == 100);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].origin == b[i].origin);
  const auto c = extract_snippets(img, {}, RandomSampling{100, 8});
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs |= !(a[i].origin == c[i].origin);
  CHECK(differs);
}

TEST_CASE("grid snippets tile an image two windows each way") {
  // No nadir: altitude below the first bin.
  auto img = testing::constant_image(60, 120, 0.5f, 0.01);
  const auto s = extract_snippets(img, {3.0, 3.0, false}, GridSampling{});
  REQUIRE(s.size() == 4);
  std::set<std::pair<std::size_t, std::size_t>> origins;
  for (const auto& sn : s) origins.insert({sn.origin.ping, sn.origin.bin});
  CHECK(origins == std::set<std::pair<std::size_t, std::size_t>>{{0, 0}, {0, 60}, {30, 0}, {30, 60}});
}

TEST_CASE("grid windows stay inside the image and outside the nadir") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pings = static_cast<std::size_t>(rng.uniform(40, 200));
    const auto bins = static_cast<std::size_t>(rng.uniform(300, 900));
    auto img = testing::constant_image(pings, bins, 0.4f, 10.0);
    SnippetSpec spec{rng.uniform(1.0, 3.0), rng.uniform(0.5, 3.0), true};
    const auto snippets = extract_snippets(img, spec, GridSampling{});
    const auto w = snippet_window(img, spec);
    for (const auto& s : snippets) {
      CHECK(s.origin.ping + w.pings <= pings);
      CHECK(s.origin.bin + w.bins <= bins);
      CHECK(static_cast<double>(s.origin.bin) * img.bin_resolution >= 10.0 - 1e-9);
      CHECK(s.pixels.rows() == w.pings);
      CHECK(s.pixels.cols() == w.bins);
      CHECK(s.pixels(0, 0) == img.intensities(s.origin.ping, s.origin.bin));
    }
  }
}

TEST_CASE("too small image") {
  auto img = testing::constant_image(10, 20, 0.5f, 0.01);
  CHECK(code_of([&] { extract_snippets(img, {}, GridSampling{}); }) == ErrorCode::ImageTooSmall);
}

TEST_CASE("raster round trip") {
  testing::TempDir dir("core");
  SUBCASE("constant 4x4") {
    Raster<float> r(4, 4, 0.5f);
    write_pgm(dir / "a.pgm", r);
    const auto back = read_pgm(dir / "a.pgm");
    for (float v : back.values()) CHECK(std::abs(v - 0.5f) <= 1.0f / 65535.0f);
  }
  SUBCASE("random values") {
    Rng rng(5);
    Raster<float> r(37, 53);
    for (float& v : r.values()) v = static_cast<float>(rng.uniform());
    write_pgm(dir / "b.pgm", r);
    const auto back = read_pgm(dir / "b.pgm");
    REQUIRE(back.rows() == 37);
    REQUIRE(back.cols() == 53);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
      worst = std::max(worst, std::abs(static_cast<double>(back.values()[i]) - r.values()[i]));
    CHECK(worst <= 1.0 / 65535.0);
  }
  SUBCASE("sidecar carries the geometry") {
    auto img = testing::constant_image(12, 300, 0.3f, 10.0);
    img.nav[3].heading = 0.25;
    write_raster(img, dir / "img.pgm");
    const auto back = read_raster(dir / "img.pgm");
    CHECK(back.nav == img.nav);
    CHECK(back.altitude == img.altitude);
    CHECK(back.bin_resolution == img.bin_resolution);
    CHECK(back.ping_resolution == img.ping_resolution);
    CHECK(back.side == img.side);
  }
  SUBCASE("nav length mismatch") {
    auto img = testing::constant_image(12, 300, 0.3f, 10.0);
    write_raster(img, dir / "img.pgm");
    Json meta = read_json(sidecar_path(dir / "img.pgm"));
    meta["nav"].erase(0);
    write_json(sidecar_path(dir / "img.pgm"), meta);
    CHECK(code_of([&] { read_raster(dir / "img.pgm"); }) == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("PGM with a foreign maxval decodes like an independent reader") {
  testing::TempDir dir("core");
  // 2x2, maxval 1000, 16-bit big-endian samples 0, 250, 999, 1000.
  const unsigned char bytes[] = {0x00, 0x00, 0x00, 0xFA, 0x03, 0xE7, 0x03, 0xE8};
  {
    std::ofstream out(dir / "m.pgm", std::ios::binary);
    out << "P5\n# hand written\n2 2\n1000\n";
    out.write(reinterpret_cast<const char*>(bytes), sizeof bytes);
  }
  // Independent decode of the same bytes.
  std::vector<double> expected;
  for (std::size_t i = 0; i < sizeof bytes; i += 2) expected.push_back((bytes[i] * 256.0 + bytes[i + 1]) / 1000.0);
  const auto r = read_pgm(dir / "m.pgm");
  REQUIRE(r.rows() == 2);
  REQUIRE(r.cols() == 2);
  for (std::size_t i = 0; i < 4; ++i) CHECK(r.values()[i] == doctest::Approx(expected[i]).epsilon(1e-6));

  // 8-bit samples at maxval 200.
  {
    std::ofstream out(dir / "e.pgm", std::ios::binary);
    out << "P5 2 2 200\n";
    const unsigned char b8[] = {0, 50, 100, 200};
    out.write(reinterpret_cast<const char*>(b8), 4);
  }
  const auto e = read_pgm(dir / "e.pgm");
  CHECK(e(0, 1) == doctest::Approx(0.25));
  CHECK(e(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("malformed PGM headers") {
  testing::TempDir dir("core");
  {
    std::ofstream out(dir / "bad.pgm", std::ios::binary);
    out << "P2\n2 2\n255\n0 0 0 0\n";
  }
  CHECK(code_of([&] { read_pgm(dir / "bad.pgm"); }) == ErrorCode::MalformedHeader);
  {
    std::ofstream out(dir / "short.pgm", std::ios::binary);
    out << "P5\n4 4\n255\nab";
  }
  CHECK(code_of([&] { read_pgm(dir / "short.pgm"); }) == ErrorCode::MalformedHeader);
  CHECK(code_of([&] { read_pgm(dir / "missing.pgm"); }) == ErrorCode::Io);
}

TEST_CASE("image validation") {
  auto img = testing::constant_image(4, 300, 0.5f);
  CHECK_NOTHROW(img.validate());
  img.intensities(0, 299) = 1.5f;
  CHECK(code_of([&] { img.validate(); }) == ErrorCode::InvalidImage);
  img.intensities(0, 299) = 0.5f;
  img.nav.pop_back();
  CHECK(code_of([&] { img.validate(); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("geo grid cell lookup") {
  GridGeometry g{10.0, 20.0, 5.0, 4, 3};
  CHECK(g.cell_of({10.0, 20.0}) == std::optional<std::size_t>(0));
  CHECK(g.cell_of({29.99, 34.99}) == std::optional<std::size_t>(11));
  CHECK_FALSE(g.cell_of({30.0, 20.0}));
  CHECK_FALSE(g.cell_of({9.99, 21.0}));
  const auto c = g.centre(5);
  CHECK(c.e == doctest::Approx(17.5));
  CHECK(c.n == doctest::Approx(27.5));
}

TEST_CASE("pd and label grids round trip") {
  testing::TempDir dir("core");
  GridGeometry g{-5.0, 3.0, 2.5, 3, 2};
  PdGridFile pd{make_pd_grid(g), {1, 0, 2, 0, 0, 3}, {2, 0, 4, 0, 1, 3}};
  pd.grid.values = {0.5, std::nan(""), 0.5, std::nan(""), 0.0, 1.0};
  write_pd_grid(dir / "pd.pgm", pd);
  const auto back = read_pd_grid(dir / "pd.pgm");
  CHECK(back.grid == pd.grid);
  CHECK(back.successes == pd.successes);
  CHECK(back.trials == pd.trials);

  LabelGridFile labels{make_label_grid(g), {"a", "b"}, "max_votes"};
  labels.grid.values = {0, kNoLabel, 3, 1, kNoLabel, 2};
  write_label_grid(dir / "l.pgm", labels);
  const auto lb = read_label_grid(dir / "l.pgm");
  CHECK(lb.grid == labels.grid);
  CHECK(lb.provenance == labels.provenance);
  CHECK(lb.policy == "max_votes");
}
