#include "commands.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seafloor/atr.hpp"
#include "seafloor/error.hpp"
#include "seafloor/features.hpp"
#include "seafloor/insertion.hpp"
#include "seafloor/json_util.hpp"
#include "seafloor/kmeans.hpp"
#include "seafloor/label_mapping.hpp"
#include "seafloor/mission_repair.hpp"
#include "seafloor/mission_set.hpp"
#include "seafloor/parallel.hpp"
#include "seafloor/performance_map.hpp"
#include "seafloor/random.hpp"
#include "seafloor/raster_io.hpp"
#include "seafloor/terrain_cluster.hpp"

namespace seafloor::cli {
namespace {

namespace fs = std::filesystem;

struct Globals {
  std::uint64_t seed = 1;
  std::size_t jobs = 0;
};

void emit(const Json& summary) { std::cout << summary.dump() << std::endl; }

std::string hash_of(const fs::path& p) { return hex64(file_hash(p)); }

void need_file(const fs::path& p) {
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) throw Error(ErrorCode::Io, "no such file: " + p.string());
}

void need_parent(const fs::path& out) {
  const fs::path parent = out.parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + parent.string() + ": " + ec.message());
}

void need_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

std::vector<SidescanImage> read_images(const std::vector<std::string>& paths) {
  for (const auto& p : paths) need_file(p);
  std::vector<SidescanImage> out;
  for (const auto& p : paths) out.push_back(read_raster(p));
  return out;
}

// Per-image snippet sampling streams: 0 training, 1 evaluation, 2 review pools.
std::vector<Snippet> sample(const SidescanImage& image, std::size_t count, std::uint64_t seed,
                            std::size_t index, std::uint64_t stream, const std::string& name) {
  return extract_snippets(image, {}, RandomSampling{count, mix_seed(seed, {index, stream})}, name);
}

std::unique_ptr<FeatureExtractor> extractor_for(const ClusterModel& model) {
  return make_extractor(model.extractor.id, model.extractor.config);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string out;
  std::size_t pings = 1000;
  std::vector<std::string> classes;
  double max_slant = 50.0;
};

void simulate(const SimulateArgs& a, const Globals& g) {
  MissionSetConfig cfg;
  cfg.pings = a.pings;
  cfg.sensor.max_slant_range = a.max_slant;
  std::vector<Mission> missions;
  if (a.classes.empty()) {
    missions = generate_mission_set(g.seed, cfg);
  } else {
    for (const auto& name : a.classes) missions.push_back(simulate_mission(terrain_from_name(name), cfg, g.seed));
  }
  need_dir(a.out);
  write_mission_set(missions, cfg, g.seed, a.out);
  const fs::path manifest = fs::path(a.out) / "manifest.json";
  emit({{"command", "simulate"},
        {"missions", missions.size()},
        {"manifest", manifest.string()},
        {"manifest_hash", hash_of(manifest)}});
}

// ---------------------------------------------------------------- insert

struct InsertArgs {
  std::string image;
  std::string out;
  std::string records;
  std::size_t count = 10;
  double min_separation = 0.0;
  double min_range = 5.0;
  std::uint32_t pass = 0;
};

void insert(const InsertArgs& a, const Globals& g) {
  need_file(a.image);
  const SidescanImage image = read_raster(a.image);
  const auto models = default_object_models();
  InsertionConfig ic;
  ic.min_ground_range = a.min_range;
  const double sep = a.min_separation > 0.0 ? a.min_separation : default_min_separation(models);
  const auto placed = insert_random_contacts(image, models, a.count, sep, g.seed, a.pass, ic);
  const fs::path records = a.records.empty() ? fs::path(a.out).replace_extension(".insertions.json") : fs::path(a.records);
  need_parent(a.out);
  need_parent(records);
  write_raster(placed.image, a.out);
  write_json(records, records_to_json(placed.records));
  emit({{"command", "insert"},
        {"contacts", placed.records.size()},
        {"image", a.out},
        {"image_hash", hash_of(a.out)},
        {"records", records.string()},
        {"records_hash", hash_of(records)}});
}

// ---------------------------------------------------------------- atr-run

struct AtrArgs {
  std::string image;
  std::string out;
  std::string insertions;
  double threshold = 0.55;
  double nms_radius = 3.0;
  double radius = 2.0;
};

void atr_run(const AtrArgs& a, const Globals&) {
  need_file(a.image);
  if (!a.insertions.empty()) need_file(a.insertions);
  const SidescanImage image = read_raster(a.image);
  DetectorConfig dc;
  dc.threshold = a.threshold;
  dc.nms_radius = a.nms_radius;
  const TemplateDetector detector(dc);
  const auto contacts = detector.detect(image);
  need_parent(a.out);
  write_json(a.out, contacts_to_json(contacts));
  Json summary = {{"command", "atr-run"},
                  {"contacts", contacts.size()},
                  {"out", a.out},
                  {"out_hash", hash_of(a.out)}};
  if (!a.insertions.empty()) {
    const auto records = records_from_json(read_json(a.insertions));
    const auto assoc = associate(contacts, records, a.radius);
    summary["insertions"] = records.size();
    summary["hits"] = assoc.hits();
    summary["false_alarms"] = assoc.false_alarms.size();
  }
  emit(summary);
}

// ---------------------------------------------------------------- perfmap

struct PerfmapArgs {
  std::string image;
  std::string out;
  std::string truth;
  std::string detector = "template";
  double p = 0.7;
  std::size_t passes = 10;
  std::size_t contacts = 10;
  double cell_size = 5.0;
  double radius = 2.0;
  double min_range = 5.0;
  bool dense = false;
};

void perfmap(const PerfmapArgs& a, const Globals& g) {
  const auto t0 = std::chrono::steady_clock::now();
  need_file(a.image);
  if (!a.truth.empty()) need_file(a.truth);
  const SidescanImage image = read_raster(a.image);
  std::optional<Raster<std::uint8_t>> truth;
  if (!a.truth.empty()) truth = read_class_raster(a.truth);

  MonteCarloConfig cfg;
  cfg.passes = a.passes;
  cfg.contacts_per_pass = a.contacts;
  cfg.cell_size = a.cell_size;
  cfg.association_radius = a.radius;
  cfg.seed = g.seed;
  cfg.jobs = g.jobs;
  cfg.insertion.min_ground_range = a.min_range;
  cfg.validate();

  std::unique_ptr<Detector> detector;
  if (a.detector == "template")
    detector = std::make_unique<TemplateDetector>();
  else
    detector = std::make_unique<ChangeOracleDetector>(image, a.p, mix_seed(g.seed, {0x0AC1Eu}));
  const auto models = default_object_models();
  const auto map = run_monte_carlo(image, models, *detector, cfg, truth ? &*truth : nullptr);

  need_dir(a.out);
  const fs::path dir(a.out);
  write_pd_grid(dir / "pd.pgm", {map.pd(), map.successes, map.trials});
  Json report = performance_report(map);
  report["image"] = fs::path(a.image).filename().string();
  report["detector"] = a.detector;
  report["seed"] = g.seed;
  write_json(dir / "report.json", report);
  Json summary = {{"command", "perfmap"},
                  {"trials", map.total_trials()},
                  {"mean_pd", report["mean_pd"]},
                  {"global_pd", report["global_pd"]},
                  {"fad", report["fad"]},
                  {"pd", (dir / "pd.pgm").string()},
                  {"report_hash", hash_of(dir / "report.json")}};
  if (a.dense) {
    write_pd_grid(dir / "pd_dense.pgm", {densify(map.pd()), {}, {}});
    summary["dense"] = (dir / "pd_dense.pgm").string();
  }
  summary["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(summary);
}

// ---------------------------------------------------------------- clustering

struct TrainArgs {
  std::vector<std::string> images;
  std::string out;
  std::size_t P = 20;
  std::size_t per_image = 400;
  std::size_t batch = 256;
  std::size_t epochs = 50;
  double tolerance = 1e-3;
};

void cluster_train(const TrainArgs& a, const Globals& g) {
  const auto images = read_images(a.images);
  const TextureExtractor extractor;
  std::vector<Point> features;
  for (std::size_t i = 0; i < images.size(); ++i)
    for (auto& fv : extract_all(extractor, sample(images[i], a.per_image, g.seed, i, 0, a.images[i]), g.jobs))
      features.push_back(std::move(fv.values));
  KMeansConfig kc;
  kc.P = a.P;
  kc.batch_size = a.batch;
  kc.max_epochs = a.epochs;
  kc.tolerance = a.tolerance;
  kc.seed = g.seed;
  const auto model = train_clusterer(features, kc, ExtractorInfo::of(extractor));
  need_parent(a.out);
  write_model(a.out, model);
  emit({{"command", "cluster-train"},
        {"P", model.P},
        {"snippets", features.size()},
        {"epochs", model.log.epochs},
        {"inertia", model.log.inertia},
        {"model", a.out},
        {"model_hash", hash_of(a.out)}});
}

struct ReviewArgs {
  std::string model;
  std::vector<std::string> images;
  std::string out;
  std::size_t k = 9;
  std::size_t per_image = 200;
};

struct Pool {
  std::vector<Snippet> snippets;
  std::vector<Point> features;
};

Pool review_pool(const ReviewArgs& a, const FeatureExtractor& extractor, const Globals& g) {
  const auto images = read_images(a.images);
  Pool pool;
  for (std::size_t i = 0; i < images.size(); ++i) {
    auto snippets = sample(images[i], a.per_image, g.seed, i, 2, fs::path(a.images[i]).filename().string());
    for (auto& fv : extract_all(extractor, snippets, g.jobs)) pool.features.push_back(std::move(fv.values));
    for (auto& s : snippets) pool.snippets.push_back(std::move(s));
  }
  return pool;
}

void cluster_reps(const ReviewArgs& a, const Globals& g) {
  need_file(a.model);
  const auto model = read_model(a.model);
  const auto extractor = extractor_for(model);
  check_extractor(model, *extractor);
  const Pool pool = review_pool(a, *extractor, g);
  const auto reps = representatives(model, pool.features, a.k);
  Json clusters = Json::array();
  for (std::size_t c = 0; c < reps.size(); ++c) {
    Json members = Json::array();
    for (const auto& r : reps[c]) {
      const Snippet& s = pool.snippets[r.index];
      members.push_back({{"image", s.source_image},
                         {"ping", s.origin.ping},
                         {"bin", s.origin.bin},
                         {"e", s.geo_center.e},
                         {"n", s.geo_center.n},
                         {"distance", r.distance}});
    }
    clusters.push_back({{"id", c}, {"count", model.counts[c]}, {"members", members}});
  }
  need_parent(a.out);
  write_json(a.out, {{"P", model.P}, {"k", a.k}, {"clusters", clusters}});
  emit({{"command", "cluster-reps"}, {"P", model.P}, {"pool", pool.snippets.size()}, {"out", a.out},
        {"out_hash", hash_of(a.out)}});
}

void label_export(const ReviewArgs& a, const Globals& g) {
  need_file(a.model);
  const auto model = read_model(a.model);
  const auto extractor = extractor_for(model);
  check_extractor(model, *extractor);
  const Pool pool = review_pool(a, *extractor, g);
  need_dir(a.out);
  const Json manifest = export_label_bundle(model, pool.snippets, pool.features, a.k, a.out);
  std::size_t files = 0;
  for (const Json& c : manifest["clusters"]) files += c["snippets"].size();
  const fs::path mpath = fs::path(a.out) / "manifest.json";
  emit({{"command", "label-export"}, {"P", model.P}, {"snippets", files}, {"manifest", mpath.string()},
        {"manifest_hash", hash_of(mpath)}});
}

struct ClassifyArgs {
  std::string image;
  std::string model;
  std::string mapping;
  std::string out;
  double cell_size = 0.0;
  bool keep_nadir = false;
};

void classify_cmd(const ClassifyArgs& a, const Globals& g) {
  need_file(a.image);
  need_file(a.model);
  if (!a.mapping.empty()) need_file(a.mapping);
  const SidescanImage image = read_raster(a.image);
  const auto model = read_model(a.model);
  const LabelMapping mapping = a.mapping.empty() ? identity_mapping(model.P) : read_mapping(a.mapping);
  const auto extractor = extractor_for(model);
  SnippetSpec spec;
  spec.exclude_nadir = !a.keep_nadir;
  const auto result = classify(image, model, mapping, *extractor, spec, a.cell_size,
                               fs::path(a.image).filename().string(), g.jobs);
  need_parent(a.out);
  write_label_grid(a.out, result.map);
  std::map<std::string, std::size_t> histogram;
  for (std::size_t i = 0; i < result.map.grid.size(); ++i)
    if (!result.map.grid.is_nodata(i)) {
      const auto label = static_cast<std::size_t>(result.map.grid.values[i]);
      ++histogram[label < mapping.classes.size() ? mapping.classes[label].name : std::to_string(label)];
    }
  emit({{"command", "classify"},
        {"snippets", result.snippets.size()},
        {"cells", histogram},
        {"out", a.out},
        {"out_hash", hash_of(a.out)}});
}

struct MergeArgs {
  std::vector<std::string> maps;
  std::string mapping;
  std::string policy = "max_votes";
  std::string out;
};

void merge(const MergeArgs& a, const Globals&) {
  for (const auto& p : a.maps) need_file(p);
  need_file(a.mapping);
  const MergePolicy policy = merge_policy_from_string(a.policy);
  const LabelMapping mapping = read_mapping(a.mapping);
  std::vector<TerrainLabelMap> maps;
  for (const auto& p : a.maps) maps.push_back(read_label_grid(p));
  const auto merged = merge_maps(maps, mapping, policy);
  need_parent(a.out);
  write_label_grid(a.out, merged);
  std::size_t labelled = 0;
  for (std::size_t i = 0; i < merged.grid.size(); ++i) labelled += merged.grid.is_nodata(i) ? 0 : 1;
  emit({{"command", "merge"}, {"maps", maps.size()}, {"policy", a.policy}, {"labelled_cells", labelled},
        {"out", a.out}, {"out_hash", hash_of(a.out)}});
}

struct EvaluateArgs {
  std::string model;
  std::vector<std::string> images;
  std::vector<std::string> truths;
  std::string out;
  std::size_t per_image = 400;
};

fs::path truth_for(const fs::path& image) {
  fs::path t = image;
  return t.replace_extension(".truth.pgm");
}

void evaluate(const EvaluateArgs& a, const Globals& g) {
  need_file(a.model);
  if (!a.truths.empty() && a.truths.size() != a.images.size())
    throw Error(ErrorCode::DimensionMismatch, "--truths must match --images one to one");
  std::vector<std::string> truths = a.truths;
  if (truths.empty())
    for (const auto& p : a.images) truths.push_back(truth_for(p).string());
  for (const auto& p : truths) need_file(p);
  const auto images = read_images(a.images);
  const auto model = read_model(a.model);
  const auto extractor = extractor_for(model);
  check_extractor(model, *extractor);

  std::vector<std::size_t> clusters;
  std::vector<int> labels;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto truth = read_class_raster(truths[i]);
    const auto snippets = sample(images[i], a.per_image, g.seed, i, 1, a.images[i]);
    const auto feats = extract_all(*extractor, snippets, g.jobs);
    for (std::size_t s = 0; s < snippets.size(); ++s) {
      const auto t = snippet_truth(truth, snippets[s]);
      if (!t) continue;
      clusters.push_back(model.assign(feats[s].values));
      labels.push_back(*t);
    }
  }
  const auto report = evaluate_precision(clusters, labels);
  Json summary = {{"command", "evaluate"}, {"precision", report.precision}, {"snippets", clusters.size()}};
  if (!a.out.empty()) {
    need_parent(a.out);
    Json full = precision_to_json(report);
    full["snippets"] = clusters.size();
    write_json(a.out, full);
    summary["out"] = a.out;
    summary["out_hash"] = hash_of(a.out);
  }
  emit(summary);
}

// ---------------------------------------------------------------- repair-plan

struct RepairArgs {
  std::string pd;
  std::string out;
  std::string flags;
  std::string overlay;
  double threshold = 0.5;
  double cell_size = 20.0;
  std::string rule = "mean";
  double fraction = 0.5;
  double heading = 0.0;
  std::vector<double> start;
  bool same_heading = false;
};

void repair_plan(const RepairArgs& a, const Globals&) {
  need_file(a.pd);
  const PdGridFile pd = read_pd_grid(a.pd);
  FlagConfig fc;
  fc.cell_size = a.cell_size;
  fc.threshold = a.threshold;
  fc.fraction = a.fraction;
  fc.rule = a.rule == "mean" ? FlagRule::MeanPd : FlagRule::FractionBelow;
  const FlagGrid flags = flag_cells(pd.grid, fc);

  PlanConfig pc;
  pc.orthogonal = !a.same_heading;
  pc.source_map = fs::path(a.pd).filename().string();
  pc.threshold = a.threshold;
  const GeoPoint start = a.start.size() == 2 ? GeoPoint{a.start[0], a.start[1]}
                                             : GeoPoint{pd.grid.geometry.origin_e, pd.grid.geometry.origin_n};
  const RepairPlan plan = plan_revisit(flags, a.heading, start, pc);
  need_parent(a.out);
  write_json(a.out, plan_to_json(plan));
  std::size_t flagged = 0;
  for (auto v : flags.values) flagged += v == 1 ? 1 : 0;
  Json summary = {{"command", "repair-plan"},
                  {"flagged_cells", flagged},
                  {"legs", plan.legs.size()},
                  {"transit_length", plan.transit_length},
                  {"out", a.out},
                  {"out_hash", hash_of(a.out)}};
  if (!a.flags.empty()) {
    need_parent(a.flags);
    write_flag_grid(a.flags, flags);
    summary["flags"] = a.flags;
  }
  if (!a.overlay.empty()) {
    const auto overlay = plan_overlay(flags, plan);
    Raster<float> scaled(overlay.rows(), overlay.cols());
    for (std::size_t i = 0; i < overlay.size(); ++i) scaled.values()[i] = static_cast<float>(overlay.values()[i]) / 255.0f;
    need_parent(a.overlay);
    write_png(a.overlay, scaled);
    summary["overlay"] = a.overlay;
  }
  emit(summary);
}

// ---------------------------------------------------------------- dispatch

int exit_code_for(ErrorCode code) {
  return code == ErrorCode::Io || code == ErrorCode::MalformedHeader ? IoFailure : DomainFailure;
}

void report_error(const std::string& command, const std::string& code, const std::string& message, int exit) {
  const Json j = {{"command", command}, {"error", code}, {"message", message}, {"exit", exit}};
  std::cerr << j.dump() << std::endl;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Seafloor complexity toolkit: sidescan simulation, detection performance maps, "
               "terrain clustering and revisit planning.",
               "seafloor"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from a TOML or INI file");

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every stochastic step")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads, 0 for all cores")
      ->envname("SEAFLOOR_JOBS")
      ->capture_default_str();

  std::function<void()> action;
  std::string command;
  auto sub = [&](const char* name, const char* help) {
    return app.add_subcommand(name, help);
  };

  SimulateArgs sim;
  {
    auto* s = sub("simulate", "Render one mission per terrain archetype with truth rasters and a manifest");
    s->add_option("--out", sim.out, "Output directory")->required();
    s->add_option("--pings", sim.pings, "Pings per mission")->capture_default_str()->check(CLI::PositiveNumber);
    s->add_option("--classes", sim.classes, "Subset of archetype names (default all six)");
    s->add_option("--max-slant", sim.max_slant, "Maximum slant range, m")->capture_default_str()->check(CLI::PositiveNumber);
    s->final_callback([&, s] {
      command = s->get_name();
      action = [&] { simulate(sim, g); };
    });
  }
  InsertArgs ins;
  {
    auto* s = sub("insert", "Insert randomly placed synthetic objects into an image");
    s->add_option("--image", ins.image, "Input sidescan raster")->required();
    s->add_option("--out", ins.out, "Output raster")->required();
    s->add_option("--records", ins.records, "Insertion records JSON (default <out>.insertions.json)");
    s->add_option("--count", ins.count, "Objects to insert")->capture_default_str();
    s->add_option("--min-separation", ins.min_separation, "Minimum object spacing, m (0 = automatic)")->capture_default_str();
    s->add_option("--min-range", ins.min_range, "Minimum ground range, m")->capture_default_str();
    s->add_option("--pass", ins.pass, "Pass number written to the records")->capture_default_str();
    s->final_callback([&, s] {
      command = s->get_name();
      action = [&] { insert(ins, g); };
    });
  }
  AtrArgs atr;
  {
    auto* s = sub("atr-run", "Run the template detector and optionally score it against insertion records");
    s->add_option("--image", atr.image, "Input sidescan raster")->required();
    s->add_option("--out", atr.out, "Contacts JSON")->required();
    s->add_option("--insertions", atr.insertions, "Insertion records to associate against");
    s->add_option("--threshold", atr.threshold, "Detector score threshold")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    s->add_option("--nms-radius", atr.nms_radius, "Non-maximum suppression radius, m")->capture_default_str();
    s->add_option("--radius", atr.radius, "Association radius, m")->capture_default_str();
    s->final_callback([&, s] {
      command = s->get_name();
      action = [&] { atr_run(atr, g); };
    });
  }
  PerfmapArgs pm;
  {
    auto* s = sub("perfmap", "Monte-Carlo probability-of-detection map");
    s->add_option("--image", pm.image, "Input sidescan raster")->required();
    s->add_option("--out", pm.out, "Output directory (pd.pgm, report.json)")->required();
    s->add_option("--truth", pm.truth, "Terrain class raster for per-class PD");
    s->add_option("--detector", pm.detector, "template or oracle")
        ->capture_default_str()
        ->check(CLI::IsMember({"template", "oracle"}));
    s->add_option("--p", pm.p, "Detection probability of the oracle detector")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    s->add_option("--passes", pm.passes, "Insertion passes N")->capture_default_str();
    s->add_option("--contacts", pm.contacts, "Objects per pass")->capture_default_str();
    s->add_option("--cell-size", pm.cell_size, "PD cell size, m")->capture_default_str();
    s->add_option("--radius", pm.radius, "Association radius, m")->capture_default_str();
    s->add_option("--min-range", pm.min_range, "Minimum insertion ground range, m")->capture_default_str();
    s->add_flag("--dense", pm.dense, "Also write an interpolated pd_dense.pgm");
    s->final_callback([&, s] {
      command = s->get_name();
      action = [&] { perfmap(pm, g); };
    });
  }
  TrainArgs tr;
  {
    auto* s = sub("cluster-train", "Train the online k-means clusterer on random snippets");
    s->add_option("--images", tr.images, "Training rasters")->required();
    s->add_option("--out", tr.out, "Model JSON")->required();
    s->add_option("-P,--clusters", tr.P, "Number of clusters")->capture_default_str()->check(CLI::PositiveNumber);
    s->add_option("--per-image", tr.per_image, "Snippets sampled per image")->capture_default_str();
    s->add_option("--batch", tr.batch, "Mini-batch size")->capture_default_str();
    s->add_option("--epochs", tr.epochs, "Maximum epochs")->capture_default_str();
    s->add_option("--tolerance", tr.tolerance, "Centroid shift tolerance")->capture_default_str();
    s->final_callback([&, s] {
      command = s->get_name();
      action = [&] { cluster_train(tr, g); };
    });
  }
  ReviewArgs reps;
  {
    auto* s = sub("cluster-reps", "List the snippets closest to each centroid");
    s->add_option("--model", reps.model, "Model JSON")->required();
    s->add_option("--images", reps.images, "Rasters to draw the pool from")->required();
    s->add_option("--out", reps.out, "Representatives JSON")->required();
    s->add_option("-k,--k", reps.k, "Snippets per cluster")->capture_default_str()->check(CLI::PositiveNumber);
    s->add_option("--per-image", reps.per_image, "Pool snippets per image")->capture_default_str();
    s->final_callback([&, s] {
      command = s->get_name();
      action = [&] { cluster_reps(reps, g); };
    });
  }
  ReviewArgs bundle;
  {
    auto* s = sub("label-export", "Write the labelling bundle (manifest.json and snippet PNGs)");
    s->add_option("--model", bundle.model, "Model JSON")->required();
    s->add_option("--images", bundle.images, "Rasters to draw the pool from")->required();
    s->add_option("--out", bundle.out, "Bundle directory")->required();
    s->add_option("-k,--k", bundle.k, "Snippets per cluster")->capture_default_str()->check(CLI::PositiveNumber);
    s->add_option("--per-image", bundle.per_image, "Pool snippets per image")->capture_default_str();
    s->final_callback([&, s] {
      command = s->get_name();
      action = [&] { label_export(bundle, g); };
    });
  }
  ClassifyArgs cls;
  {
    auto* s = sub("classify", "Label a raster with a trained model and a cluster-to-class mapping");
    s->add_option("--image", cls.image, "Input sidescan raster")->required();
    s->add_option("--model", cls.model, "Model JSON")->required();
    s->add_option("--mapping", cls.mapping, "Label mapping JSON (default identity)");
    s->add_option("--out", cls.out, "Label grid PGM")->required();
    s->add_option("--cell-size", cls.cell_size, "Label cell size, m (0 = snippet size)")->capture_default_str();
    s->add_flag("--keep-nadir", cls.keep_nadir, "Classify snippets that touch the nadir");
    s->final_callback([&, s] {
      command = s->get_name();
      action = [&] { classify_cmd(cls, g); };
    });
  }
  MergeArgs mg;
  {
    auto* s = sub("merge", "Merge label grids from several passes");
    s->add_option("--maps", mg.maps, "Label grids sharing one geometry")->required();
    s->add_option("--mapping", mg.mapping, "Label mapping JSON with complexity ranks")->required();
    s->add_option("--policy", mg.policy, "max_votes or max_complexity")
        ->capture_default_str()
        ->check(CLI::IsMember({"max_votes", "max_complexity"}));
    s->add_option("--out", mg.out, "Merged label grid")->required();
    s->final_callback([&, s] {
      command = s->get_name();
      action = [&] { merge(mg, g); };
    });
  }
  EvaluateArgs ev;
  {
    auto* s = sub("evaluate", "Cluster-majority precision against truth rasters");
    s->add_option("--model", ev.model, "Model JSON")->required();
    s->add_option("--images", ev.images, "Rasters to evaluate")->required();
    s->add_option("--truths", ev.truths, "Truth rasters (default <image>.truth.pgm)");
    s->add_option("--out", ev.out, "Full report JSON");
    s->add_option("--per-image", ev.per_image, "Snippets sampled per image")->capture_default_str();
    s->final_callback([&, s] {
      command = s->get_name();
      action = [&] { evaluate(ev, g); };
    });
  }
  RepairArgs rp;
  {
    auto* s = sub("repair-plan", "Flag low-PD cells and plan revisit legs");
    s->add_option("--pd", rp.pd, "PD grid PGM")->required();
    s->add_option("--out", rp.out, "Plan JSON")->required();
    s->add_option("--threshold", rp.threshold, "PD threshold")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    s->add_option("--cell-size", rp.cell_size, "Repair cell size, m")->capture_default_str();
    s->add_option("--rule", rp.rule, "mean or fraction")->capture_default_str()->check(CLI::IsMember({"mean", "fraction"}));
    s->add_option("--fraction", rp.fraction, "Fraction of PD cells below threshold for the fraction rule")->capture_default_str();
    s->add_option("--heading", rp.heading, "Original mission heading, rad clockwise from north")->capture_default_str();
    s->add_option("--start", rp.start, "Vehicle start easting and northing (default grid origin)")->expected(2);
    s->add_flag("--same-heading", rp.same_heading, "Legs parallel to the original track");
    s->add_option("--flags", rp.flags, "Write the flag grid PGM");
    s->add_option("--overlay", rp.overlay, "Write an inspection PNG");
    s->final_callback([&, s] {
      command = s->get_name();
      action = [&] { repair_plan(rp, g); };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << std::flush;
    report_error(command, "usage", e.what(), Usage);
    return Usage;
  }

  if (g.jobs > 0) set_default_jobs(g.jobs);
  try {
    action();
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    report_error(command, std::string(to_string(e.code())), e.what(), code);
    return code;
  } catch (const fs::filesystem_error& e) {
    report_error(command, "Io", e.what(), IoFailure);
    return IoFailure;
  } catch (const Json::exception& e) {
    report_error(command, "MalformedHeader", e.what(), IoFailure);
    return IoFailure;
  } catch (const std::exception& e) {
    report_error(command, "Internal", e.what(), DomainFailure);
    return DomainFailure;
  }
  return Ok;
}

}  // namespace seafloor::cli
