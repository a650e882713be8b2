#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "seafloor/error.hpp"
#include "seafloor/insertion.hpp"
#include "support.hpp"

using namespace seafloor;

namespace {

const SidescanImage& far_flat() {
  static const SidescanImage img = testing::small_mission(TerrainClass::FlatSand, 120, 3, 80.0).data.image;
  return img;
}

double shadow_end(const InsertionResult& r) {
  double end = 0.0;
  for (const auto& s : r.shadows) end = std::max(end, s.end);
  return end;
}

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

TEST_CASE("primitives") {
  const auto cyl = make_cylinder(2.0, 0.5);
  CHECK(cyl.length() == doctest::Approx(2.0));
  CHECK(cyl.width() == doctest::Approx(0.5));
  CHECK(cyl.max_height() == doctest::Approx(0.5).epsilon(0.02));
  CHECK(cyl.height_at(0.0, 0.0) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(cyl.height_at(0.0, 0.3) == 0.0);

  const auto drum = make_truncated_cone(0.5, 0.5, 0.4);
  CHECK(drum.height_at(0.1, 0.1) == doctest::Approx(0.4));
  CHECK(drum.height_at(0.45, 0.45) == 0.0);

  const auto sphere = make_sphere(0.3);
  CHECK(sphere.max_height() == doctest::Approx(0.6).epsilon(0.02));

  const auto wedge = make_wedge(1.0, 0.6, 0.3);
  CHECK(wedge.height_at(0.0, 0.25) > wedge.height_at(0.0, -0.25));
  CHECK(wedge.max_height() <= 0.3 + 1e-6);

  for (const auto& m : {cyl, drum, sphere, wedge}) {
    CHECK_NOTHROW(m.validate());
    for (float h : m.heightfield.values()) CHECK(h >= 0.0f);
  }
  CHECK_THROWS_AS(make_cylinder(-1.0, 0.5), Error);
  CHECK(default_min_separation(default_object_models()) == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("shadow length matches similar triangles and doubles with range") {
  const double a = *far_flat().altitude;
  const double h = 0.5;
  const auto drum = make_truncated_cone(0.5, 0.5, h);
  double previous = 0.0;
  for (double R : {30.0, 60.0}) {
    const auto r = insert_contact(far_flat(), drum, {60, R - 0.5, 1}, 0.0, 1);
    const double L = shadow_end(r) - R;
    const double expected = R * h / (a - h);
    const double bin_ground = far_flat().bin_resolution * ground_to_slant(R, a) / R;
    CHECK(std::abs(L - expected) <= bin_ground);
    if (previous > 0.0) CHECK(L / previous == doctest::Approx(2.0).epsilon(0.05));
    previous = L;
  }
  CHECK(30.0 * 0.5 / 9.5 == doctest::Approx(1.58).epsilon(0.005));
}

TEST_CASE("lying cylinder shadow grows with range") {
  const auto cyl = make_cylinder(2.0, 0.5);
  const auto near = insert_contact(far_flat(), cyl, {60, 30.0, 1}, 0.0, 1);
  const auto far = insert_contact(far_flat(), cyl, {60, 60.0, 1}, 0.0, 1);
  auto length = [](const InsertionResult& r) {
    double best = 0.0;
    for (const auto& s : r.shadows) best = std::max(best, s.end - s.start);
    return best;
  };
  CHECK(length(near) > 1.0);
  CHECK(length(far) / length(near) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("zero height object leaves the image untouched") {
  ObjectModel flat{"flat", Raster<float>(50, 25, 0.0f), 0.02, 1.8};
  const auto r = insert_contact(far_flat(), flat, {50, 25.0, 1}, 0.3, 4);
  CHECK(r.image == far_flat());
}

TEST_CASE("pixels outside the footprint are unchanged") {
  const auto models = default_object_models();
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& m = models[i % models.size()];
    const double R = 12.0 + 8.0 * static_cast<double>(i);
    const auto r = insert_contact(far_flat(), m, {40 + 5 * i, R, 1}, 0.4 * static_cast<double>(i), 7 + i);
    std::set<std::pair<std::size_t, std::size_t>> touched;
    for (const auto& px : r.pixels) touched.insert({px.pixel.ping, px.pixel.bin});
    REQUIRE_FALSE(touched.empty());
    std::size_t changed_outside = 0, changed_inside = 0;
    for (std::size_t p = 0; p < far_flat().pings(); ++p)
      for (std::size_t b = 0; b < far_flat().bins(); ++b) {
        const bool differs = r.image.intensities(p, b) != far_flat().intensities(p, b);
        if (!differs) continue;
        if (touched.count({p, b}))
          ++changed_inside;
        else
          ++changed_outside;
      }
    CHECK(changed_outside == 0);
    CHECK(changed_inside > 0);
    // Highlight precedes shadow along range.
    std::size_t highlights = 0, shadows = 0;
    for (const auto& px : r.pixels) (px.kind == PixelKind::Highlight ? highlights : shadows)++;
    CHECK(highlights > 0);
    CHECK(shadows > 0);
  }
}

TEST_CASE("grain matching keeps the surrounding ring statistics") {
  const auto& img = far_flat();
  const double a = *img.altitude;
  const auto cyl = make_cylinder(2.0, 0.5);
  for (double R : {15.0, 30.0, 45.0}) {
    const ContactLocation at{60, R, 1};
    const auto r = insert_contact(img, cyl, at, 0.7, 2);
    const GeoPoint c = img.ground_position(at.ping, 1, R);
    const double inner = cyl.bounding_radius();
    const double outer = inner + 2.0;
    std::set<std::pair<std::size_t, std::size_t>> shadow;
    for (const auto& px : r.pixels)
      if (px.kind == PixelKind::Shadow) shadow.insert({px.pixel.ping, px.pixel.bin});
    double before = 0.0, after = 0.0;
    std::size_t n = 0;
    for (std::size_t p = 0; p < img.pings(); ++p)
      for (std::size_t b = 0; b < img.bins(); ++b) {
        const double s = (static_cast<double>(b) + 0.5) * img.bin_resolution;
        if (s <= a) continue;
        const double d = distance(img.ground_position(p, 1, std::sqrt(s * s - a * a)), c);
        if (d < inner || d > outer || shadow.count({p, b})) continue;
        before += img.intensities(p, b);
        after += r.image.intensities(p, b);
        ++n;
      }
    REQUIRE(n > 100);
    INFO("R = " << R);
    CHECK(std::abs(after - before) / before < 0.05);
  }
}

TEST_CASE("insertion preconditions") {
  const auto cyl = make_cylinder(2.0, 0.5);
  CHECK(code_of([&] { insert_contact(far_flat(), cyl, {60, 0.3, 1}, 0.0, 1); }) == ErrorCode::InsideNadir);
  CHECK(code_of([&] { insert_contact(far_flat(), cyl, {2, 30.0, 1}, 0.0, 1); }) ==
        ErrorCode::FootprintOutsideImage);
  CHECK(code_of([&] { insert_contact(far_flat(), cyl, {60, 79.5, 1}, 0.0, 1); }) ==
        ErrorCode::FootprintOutsideImage);
  CHECK(code_of([&] { insert_contact(far_flat(), cyl, {60, 30.0, -1}, 0.0, 1); }) ==
        ErrorCode::FootprintOutsideImage);
}

TEST_CASE("insert_contact is deterministic and leaves its input alone") {
  const SidescanImage copy = far_flat();
  const auto cyl = make_cylinder(2.0, 0.5);
  const auto a = insert_contact(far_flat(), cyl, {60, 25.0, 1}, 1.0, 11);
  const auto b = insert_contact(far_flat(), cyl, {60, 25.0, 1}, 1.0, 11);
  CHECK(a.image == b.image);
  CHECK(a.record == b.record);
  CHECK(far_flat() == copy);
  CHECK(a.record.object == cyl.name);
  CHECK(a.record.ground_range == 25.0);
  CHECK(a.record.ping == 60);
}

TEST_CASE("random placement honours separation") {
  // 100 m of track and a 50 m swath.
  const auto img = testing::constant_image(1000, 1000, 0.4f, 10.0);
  const auto models = default_object_models();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = insert_random_contacts(img, models, 10, 5.0, seed, 3);
    REQUIRE(r.records.size() == 10);
    for (std::size_t i = 0; i < r.records.size(); ++i) {
      CHECK(r.records[i].pass == 3);
      for (std::size_t j = i + 1; j < r.records.size(); ++j)
        CHECK(distance(r.records[i].geo, r.records[j].geo) >= 5.0);
    }
    const auto again = insert_random_contacts(img, models, 10, 5.0, seed, 3);
    CHECK(again.records == r.records);
    CHECK(again.image == r.image);
  }
  const auto tiny = testing::constant_image(40, 300, 0.4f, 10.0);
  CHECK(code_of([&] { insert_random_contacts(tiny, models, 1000000, 5.0, 1); }) ==
        ErrorCode::PlacementInfeasible);
}

TEST_CASE("insertion records json round trip") {
  const auto img = testing::constant_image(200, 900, 0.4f);
  const auto models = default_object_models();
  const auto placed = insert_random_contacts(img, models, 4, 4.0, 9, 3);
  const Json j = records_to_json(placed.records);
  REQUIRE(j.size() == 4);
  CHECK(j[0]["pass"] == 3);
  CHECK(records_from_json(j) == placed.records);
  Json broken = j;
  broken[1].erase("ground_range");
  try {
    records_from_json(broken);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedHeader);
  }
  CHECK_THROWS_AS(records_from_json(Json::object()), Error);
}
