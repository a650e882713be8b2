#include <cmath>

#include "doctest.h"
#include "seafloor/atr.hpp"
#include "seafloor/error.hpp"
#include "seafloor/features.hpp"
#include "seafloor/kmeans.hpp"
#include "seafloor/label_mapping.hpp"
#include "seafloor/mission_repair.hpp"
#include "seafloor/random.hpp"
#include "seafloor/raster_io.hpp"
#include "seafloor/terrain_cluster.hpp"
#include "support.hpp"

using namespace seafloor;

namespace {

const std::string kCli = SEAFLOOR_CLI;

testing::CommandResult cli(const std::string& args, const testing::TempDir& dir) {
  return testing::run_command(kCli, args, dir.path());
}

Json last_line(const std::string& text) {
  auto end = text.find_last_not_of('\n');
  REQUIRE(end != std::string::npos);
  const auto start = text.rfind('\n', end);
  return Json::parse(text.substr(start == std::string::npos ? 0 : start + 1, end + 1 - (start == std::string::npos ? 0 : start + 1)));
}

}  // namespace

TEST_CASE("unknown subcommand is a usage error") {
  testing::TempDir dir("cli_usage");
  const auto r = cli("frobnicate", dir);
  CHECK(r.exit == 2);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(last_line(r.err)["error"] == "usage");
  CHECK(r.out.empty());

  CHECK(cli("", dir).exit == 2);
  CHECK(cli("simulate", dir).exit == 2);  // --out is required
  CHECK(cli("repair-plan --pd x --out y --rule median", dir).exit == 2);
}

TEST_CASE("help lists every subcommand") {
  testing::TempDir dir("cli_help");
  const auto r = cli("--help", dir);
  CHECK(r.exit == 0);
  for (const char* name : {"simulate", "insert", "atr-run", "perfmap", "cluster-train", "cluster-reps", "classify",
                           "merge", "evaluate", "repair-plan", "label-export"})
    CHECK(r.out.find(name) != std::string::npos);
  const auto sub = cli("perfmap --help", dir);
  CHECK(sub.exit == 0);
  CHECK(sub.out.find("--passes") != std::string::npos);
  CHECK(r.out.find("--jobs") != std::string::npos);
  CHECK(r.out.find("SEAFLOOR_JOBS") != std::string::npos);
}

TEST_CASE("simulate twice gives identical manifests") {
  testing::TempDir dir("cli_sim");
  const std::string common = " --seed 1 --pings 60 --max-slant 30 --classes flat_sand marine_growth";
  const auto a = cli("simulate --out " + (dir / "a").string() + common, dir);
  REQUIRE(a.exit == 0);
  const auto b = cli("simulate --out " + (dir / "b").string() + common, dir);
  REQUIRE(b.exit == 0);
  const Json sa = Json::parse(a.out), sb = Json::parse(b.out);
  CHECK(sa["missions"] == 2);
  CHECK(sa["manifest_hash"] == sb["manifest_hash"]);
  CHECK(testing::slurp(dir / "a" / "manifest.json") == testing::slurp(dir / "b" / "manifest.json"));
  const auto c = cli("simulate --out " + (dir / "c").string() + " --seed 2 --pings 60 --max-slant 30 --classes flat_sand", dir);
  REQUIRE(c.exit == 0);
  CHECK(read_json(dir / "c" / "manifest.json")["missions"][0]["image_hash"] !=
        read_json(dir / "a" / "manifest.json")["missions"][0]["image_hash"]);
}

TEST_CASE("perfmap report ranges") {
  testing::TempDir dir("cli_perfmap");
  REQUIRE(cli("simulate --out " + (dir / "m").string() + " --pings 150 --classes flat_sand", dir).exit == 0);
  const auto img = dir / "m" / "mission_flat_sand.pgm";
  const auto r = cli("perfmap --image " + img.string() + " --truth " + (dir / "m" / "mission_flat_sand.truth.pgm").string() +
                         " --out " + (dir / "pd").string() + " --passes 3 --dense",
                     dir);
  REQUIRE(r.exit == 0);
  const Json summary = Json::parse(r.out);
  CHECK(summary["trials"] == 30);
  const Json report = read_json(dir / "pd" / "report.json");
  CHECK(report["fad"].get<double>() >= 0.0);
  CHECK(report["mean_pd"].get<double>() >= 0.0);
  CHECK(report["mean_pd"].get<double>() <= 1.0);
  CHECK(report["per_class_pd"].contains("0"));
  const auto pd = read_pd_grid(dir / "pd" / "pd.pgm");
  std::uint32_t trials = 0;
  for (auto t : pd.trials) trials += t;
  CHECK(trials == 30);
  CHECK(std::filesystem::exists(dir / "pd" / "pd_dense.pgm"));

  const auto plan = cli("repair-plan --pd " + (dir / "pd" / "pd.pgm").string() + " --out " + (dir / "plan.json").string() +
                            " --threshold 1 --overlay " + (dir / "plan.png").string() + " --flags " + (dir / "flags.pgm").string(),
                        dir);
  REQUIRE(plan.exit == 0);
  const Json ps = Json::parse(plan.out);
  const auto parsed = plan_from_json(read_json(dir / "plan.json"));
  CHECK(ps["legs"] == parsed.legs.size());
  CHECK(parsed.threshold == 1.0);
  CHECK(std::filesystem::exists(dir / "plan.png"));
}

TEST_CASE("error classes map to exit codes") {
  testing::TempDir dir("cli_errors");
  const auto missing = cli("atr-run --image " + (dir / "nope.pgm").string() + " --out " + (dir / "c.json").string(), dir);
  CHECK(missing.exit == 3);
  CHECK(last_line(missing.err)["error"] == "Io");
  CHECK(last_line(missing.err)["command"] == "atr-run");
  CHECK_FALSE(std::filesystem::exists(dir / "c.json"));

  write_raster(testing::constant_image(30, 260, 0.4f), dir / "tiny.pgm");
  const auto crowded = cli("insert --image " + (dir / "tiny.pgm").string() + " --out " + (dir / "x.pgm").string() + " --count 60", dir);
  CHECK(crowded.exit == 4);
  CHECK(last_line(crowded.err)["error"] == "PlacementInfeasible");

  std::ofstream(dir / "bad.json") << "{ not json";
  const auto bad = cli("merge --maps " + (dir / "tiny.pgm").string() + " --mapping " + (dir / "bad.json").string() +
                           " --out " + (dir / "m.pgm").string(),
                       dir);
  CHECK(bad.exit == 3);
}

TEST_CASE("jobs falls back to the environment") {
  testing::TempDir dir("cli_jobs");
  const std::string args = "simulate --out " + (dir / "m").string() + " --pings 40 --max-slant 25 --classes mud";
  CHECK(testing::run_command("env", "SEAFLOOR_JOBS=2 '" + kCli + "' " + args, dir.path()).exit == 0);
  CHECK(testing::run_command("env", "SEAFLOOR_JOBS=many '" + kCli + "' " + args, dir.path()).exit == 2);
  CHECK(testing::run_command("env", "SEAFLOOR_JOBS=many '" + kCli + "' --jobs 1 " + args, dir.path()).exit == 0);
}

TEST_CASE("chained stages reproduce the in-process results") {
  testing::TempDir dir("cli_chain");
  REQUIRE(cli("simulate --seed 4 --out " + (dir / "m").string() + " --pings 200 --classes flat_sand clutter", dir).exit == 0);
  const auto a = dir / "m" / "mission_flat_sand.pgm";
  const auto b = dir / "m" / "mission_clutter.pgm";
  const std::string images = " --images " + a.string() + " " + b.string();
  REQUIRE(cli("cluster-train --seed 4 -P 5 --per-image 150" + images + " --out " + (dir / "model.json").string(), dir).exit == 0);

  // Same sampling streams in process.
  const std::vector<SidescanImage> imgs{read_raster(a), read_raster(b)};
  const std::vector<std::string> names{a.string(), b.string()};
  const TextureExtractor ex;
  std::vector<Point> feats;
  for (std::size_t i = 0; i < 2; ++i)
    for (auto& fv : extract_all(ex, extract_snippets(imgs[i], {}, RandomSampling{150, mix_seed(4, {i, 0})}, names[i])))
      feats.push_back(fv.values);
  KMeansConfig kc;
  kc.P = 5;
  kc.seed = 4;
  const auto model = train_clusterer(feats, kc, ExtractorInfo::of(ex));
  CHECK(read_json(dir / "model.json") == model_to_json(model));

  LabelMapping mapping{5, 2, {0, 1, 0, 1, 1}, {{"benign", 0}, {"complex", 1}}};
  if (check_mapping(mapping) != MappingStatus::Ok) mapping.map = {0, 1, 1, 1, 1};
  write_mapping(dir / "mapping.json", mapping);
  REQUIRE(cli("classify --image " + a.string() + " --model " + (dir / "model.json").string() + " --mapping " +
                  (dir / "mapping.json").string() + " --out " + (dir / "a.labels.pgm").string(),
              dir)
              .exit == 0);
  const auto in_process = classify(imgs[0], model, mapping, ex, {}, 0.0, "mission_flat_sand.pgm");
  const auto from_file = read_label_grid(dir / "a.labels.pgm");
  CHECK(from_file.grid == in_process.map.grid);
  CHECK(from_file.provenance == in_process.map.provenance);

  const auto merged = cli("merge --maps " + (dir / "a.labels.pgm").string() + " " + (dir / "a.labels.pgm").string() +
                              " --mapping " + (dir / "mapping.json").string() + " --policy max_complexity --out " +
                              (dir / "merged.pgm").string(),
                          dir);
  REQUIRE(merged.exit == 0);
  CHECK(read_label_grid(dir / "merged.pgm").grid == in_process.map.grid);

  const auto ev = cli("evaluate --seed 4 --model " + (dir / "model.json").string() + images + " --out " +
                          (dir / "eval.json").string(),
                      dir);
  REQUIRE(ev.exit == 0);
  const double precision = Json::parse(ev.out)["precision"].get<double>();
  CHECK(precision >= 0.0);
  CHECK(precision <= 1.0);

  REQUIRE(cli("cluster-reps --model " + (dir / "model.json").string() + images + " -k 3 --out " +
                  (dir / "reps.json").string(),
              dir)
              .exit == 0);
  const Json reps = read_json(dir / "reps.json");
  CHECK(reps["clusters"].size() == 5);
  for (const Json& c : reps["clusters"]) CHECK(c["members"].size() <= 3);

  REQUIRE(cli("label-export --model " + (dir / "model.json").string() + images + " -k 4 --out " +
                  (dir / "bundle").string(),
              dir)
              .exit == 0);
  const Json manifest = read_json(dir / "bundle" / "manifest.json");
  CHECK(manifest["P"] == 5);
  for (const Json& c : manifest["clusters"])
    for (const Json& s : c["snippets"]) CHECK(std::filesystem::exists(dir / "bundle" / s["file"].get<std::string>()));

  REQUIRE(cli("insert --seed 4 --image " + a.string() + " --out " + (dir / "ins.pgm").string() + " --count 5", dir).exit == 0);
  const auto atr = cli("atr-run --image " + (dir / "ins.pgm").string() + " --insertions " +
                           (dir / "ins.insertions.json").string() + " --out " + (dir / "contacts.json").string(),
                       dir);
  REQUIRE(atr.exit == 0);
  const Json as = Json::parse(atr.out);
  CHECK(as["insertions"] == 5);
  CHECK(as["hits"].get<int>() <= 5);
  CHECK(contacts_from_json(read_json(dir / "contacts.json")).size() == as["contacts"].get<std::size_t>());
}
