#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "seafloor/error.hpp"
#include "seafloor/performance_map.hpp"
#include "seafloor/random.hpp"
#include "support.hpp"

using namespace seafloor;

namespace {

const SidescanImage& flat() {
  static const SidescanImage img = testing::small_mission(TerrainClass::FlatSand, 200, 3).data.image;
  return img;
}

TrialOutcome outcome_at(const SidescanImage& img, std::size_t ping, double range, bool hit, std::uint32_t pass) {
  TrialOutcome o;
  o.record.ping = ping;
  o.record.ground_range = range;
  o.record.pass = pass;
  o.record.geo = img.ground_position(ping, 1, range);
  o.detected = hit;
  return o;
}

class EverythingDetector final : public Detector {
 public:
  explicit EverythingDetector(SidescanImage base) : oracle_(std::move(base), 1.0, 0) {}
  std::vector<Contact> detect(const SidescanImage& image) const override { return oracle_.detect(image); }

 private:
  ChangeOracleDetector oracle_;
};

}  // namespace

TEST_CASE("cell PD is the mean of its pass outcomes") {
  const auto img = testing::constant_image(100, 600, 0.4f);
  MonteCarloConfig cfg;
  cfg.cell_size = 5.0;
  std::vector<PassResult> passes;
  const bool hits[] = {true, false, true, true};
  for (std::uint32_t p = 0; p < 4; ++p) passes.push_back({p, {outcome_at(img, 50, 20.0, hits[p], p)}, 0});
  const auto map = merge_passes(img, cfg, passes);
  const auto cell = map.geometry.cell_of(img.ground_position(50, 1, 20.0));
  REQUIRE(cell);
  CHECK(map.trials[*cell] == 4);
  CHECK(map.successes[*cell] == 3);
  CHECK(map.pd().values[*cell] == doctest::Approx(0.75));
  CHECK(map.global_pd() == doctest::Approx(0.75));
  std::size_t untried = 0;
  const auto pd = map.pd();
  for (std::size_t i = 0; i < pd.size(); ++i) untried += pd.is_nodata(i) ? 1 : 0;
  CHECK(untried == pd.size() - 1);
}

TEST_CASE("false alarm density per hectare per pass") {
  PerformanceMap m;
  m.false_alarms = 2;
  m.passes = 1;
  m.ensonified_hectares = 100.0 * 200.0 / 10000.0;
  CHECK(m.fad() == doctest::Approx(1.0));
  m.passes = 4;
  m.false_alarms = 8;
  CHECK(m.fad() == doctest::Approx(1.0));

  // 200 m of track, 100.5 m of slant range.
  const auto img = testing::constant_image(2000, 2010, 0.3f, 10.0, 0.05, 0.1);
  const double ground = std::sqrt(100.5 * 100.5 - 100.0);
  CHECK(ensonified_area(img) == doctest::Approx(ground * 200.0));
}

TEST_CASE("a detector that finds everything") {
  MonteCarloConfig cfg;
  cfg.passes = 3;
  const EverythingDetector det(flat());
  const auto models = default_object_models();
  const auto map = run_monte_carlo(flat(), models, det, cfg);
  CHECK(map.total_trials() == 30);
  const auto pd = map.pd();
  std::size_t trialed = 0;
  for (std::size_t i = 0; i < pd.size(); ++i)
    if (!pd.is_nodata(i)) {
      ++trialed;
      CHECK(pd.values[i] == 1.0);
    }
  CHECK(trialed > 0);
  CHECK(map.fad() >= 0.0);
  CHECK(map.global_pd() == 1.0);
}

TEST_CASE("pass order does not matter") {
  MonteCarloConfig cfg;
  cfg.passes = 4;
  cfg.keep_pass_maps = true;
  const TemplateDetector det;
  const auto models = default_object_models();
  std::vector<PassResult> passes;
  for (std::uint32_t p = 0; p < cfg.passes; ++p) passes.push_back(run_pass(flat(), models, det, cfg, p));
  const auto forward = merge_passes(flat(), cfg, passes);
  std::reverse(passes.begin(), passes.end());
  const auto backward = merge_passes(flat(), cfg, passes);
  std::swap(passes[0], passes[2]);
  const auto shuffled = merge_passes(flat(), cfg, passes);
  for (const auto* m : {&backward, &shuffled}) {
    CHECK(m->successes == forward.successes);
    CHECK(m->trials == forward.trials);
    CHECK(m->false_alarms == forward.false_alarms);
    CHECK(m->outcomes == forward.outcomes);
  }
  REQUIRE(forward.pass_maps.size() == 4);
  for (const auto& pm : forward.pass_maps)
    for (auto v : pm.values) CHECK((v == 0 || v == 1 || v == 255));

  const auto parallel = run_monte_carlo(flat(), models, det, cfg);
  MonteCarloConfig serial_cfg = cfg;
  serial_cfg.jobs = 1;
  const auto serial = run_monte_carlo(flat(), models, det, serial_cfg);
  CHECK(parallel.successes == forward.successes);
  CHECK(serial.successes == parallel.successes);
  CHECK(serial.trials == parallel.trials);
  CHECK(serial.outcomes == parallel.outcomes);
}

TEST_CASE("cell PD converges to the stub detection probability") {
  // One large cell collects every trial.
  const auto img = testing::constant_image(150, 500, 0.4f, 10.0);
  const auto models = default_object_models();
  const double p = 0.7;
  MonteCarloConfig cfg;
  cfg.passes = 50;
  cfg.contacts_per_pass = 6;
  cfg.min_separation = 2.5;
  cfg.cell_size = 100.0;
  cfg.insertion.min_ground_range = 8.0;  // keep objects clear of near-range layover
  int outside = 0;
  const int runs = 100;
  for (int run = 0; run < runs; ++run) {
    cfg.seed = 1000 + static_cast<std::uint64_t>(run);
    const ChangeOracleDetector det(img, p, cfg.seed * 7 + 1);
    const auto map = run_monte_carlo(img, models, det, cfg);
    REQUIRE(map.total_trials() == 300);
    std::size_t cell = 0;
    while (map.trials[cell] == 0) ++cell;
    REQUIRE(map.trials[cell] == 300);
    const double pd = map.pd().values[cell];
    if (std::abs(pd - p) > 3.0 * std::sqrt(p * (1.0 - p) / 300.0)) ++outside;
  }
  CHECK(outside <= runs / 100);
}

TEST_CASE("infeasible placement propagates") {
  const auto tiny = testing::constant_image(30, 260, 0.4f);
  MonteCarloConfig cfg;
  cfg.contacts_per_pass = 50;
  const TemplateDetector det;
  const auto models = default_object_models();
  try {
    run_monte_carlo(tiny, models, det, cfg);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PlacementInfeasible);
  }
  cfg.passes = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("densify") {
  GridGeometry g{0.0, 0.0, 5.0, 4, 3};
  SUBCASE("single trialed cell") {
    auto pd = make_pd_grid(g);
    pd.values[5] = 0.6;
    const auto d = densify(pd);
    for (double v : d.values) CHECK(v == doctest::Approx(0.6));
  }
  SUBCASE("midpoint between 0 and 1") {
    GridGeometry line{0.0, 0.0, 5.0, 3, 1};
    auto pd = make_pd_grid(line);
    pd.values[0] = 0.0;
    pd.values[2] = 1.0;
    const auto d = densify(pd, 2);
    CHECK(d.values[1] == doctest::Approx(0.5));
    CHECK(d.values[0] == 0.0);
    CHECK(d.values[2] == 1.0);
  }
  SUBCASE("no trials") {
    try {
      densify(make_pd_grid(g));
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoTrials);
    }
  }
  SUBCASE("fills stay within the trialed range") {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
      GridGeometry rg{0.0, 0.0, 1.0, 1 + rng.below(12), 1 + rng.below(12)};
      auto pd = make_pd_grid(rg);
      double lo = 2.0, hi = -1.0;
      bool any = false;
      for (std::size_t i = 0; i < pd.size(); ++i)
        if (rng.uniform() < 0.3) {
          pd.values[i] = rng.uniform();
          lo = std::min(lo, pd.values[i]);
          hi = std::max(hi, pd.values[i]);
          any = true;
        }
      if (!any) continue;
      const auto d = densify(pd, 1 + rng.below(6));
      for (std::size_t i = 0; i < pd.size(); ++i) {
        CHECK_FALSE(d.is_nodata(i));
        if (!pd.is_nodata(i)) CHECK(d.values[i] == pd.values[i]);
        CHECK(d.values[i] >= lo - 1e-12);
        CHECK(d.values[i] <= hi + 1e-12);
      }
    }
  }
}

TEST_CASE("binarize") {
  GridGeometry g{0.0, 0.0, 1.0, 4, 1};
  auto pd = make_pd_grid(g);
  pd.values = {0.3, 0.5, 0.9, std::nan("")};
  const auto f = binarize(pd, 0.5);
  CHECK(f.values == std::vector<std::uint8_t>{1, 0, 0, 0});
  const auto none = binarize(pd, 0.0);
  CHECK(none.values == std::vector<std::uint8_t>{0, 0, 0, 0});
  CHECK_THROWS_AS(binarize(pd, 1.5), Error);
}

TEST_CASE("per class PD and report") {
  std::vector<TrialOutcome> o(5);
  o[0].terrain_class = 0;
  o[0].detected = true;
  o[1].terrain_class = 0;
  o[2].terrain_class = 4;
  o[2].detected = true;
  o[3].terrain_class = 4;
  o[3].detected = true;
  const auto per = per_class_pd(o);
  REQUIRE(per.size() == 2);
  CHECK(per.at(0).pd() == doctest::Approx(0.5));
  CHECK(per.at(4).pd() == doctest::Approx(1.0));
  CHECK(per.at(4).trials == 2);

  PerformanceMap m;
  m.geometry = {0.0, 0.0, 5.0, 2, 1};
  m.successes = {1, 0};
  m.trials = {2, 0};
  m.passes = 2;
  m.ensonified_hectares = 1.0;
  m.false_alarms = 3;
  m.outcomes = o;
  const Json r = performance_report(m);
  CHECK(r["N"] == 2);
  CHECK(r["fad"].get<double>() == doctest::Approx(1.5));
  CHECK(r["mean_pd"].get<double>() == doctest::Approx(0.5));
  CHECK(r["per_class_pd"].contains("0"));
}
