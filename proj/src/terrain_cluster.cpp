#include "seafloor/terrain_cluster.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>

#include "seafloor/error.hpp"
#include "seafloor/geo_grid.hpp"
#include "seafloor/parallel.hpp"

namespace seafloor {

Classification classify(const SidescanImage& image, const ClusterModel& model,
                        const LabelMapping& mapping, const FeatureExtractor& extractor,
                        const SnippetSpec& spec, double cell_size, const std::string& source,
                        std::size_t jobs) {
  check_extractor(model, extractor);
  if (mapping.P != model.P)
    throw Error(ErrorCode::MappingMismatch, "mapping covers P = " + std::to_string(mapping.P) +
                                                " clusters, model has " + std::to_string(model.P));
  validate_mapping(mapping);

  const std::vector<Snippet> snippets = extract_snippets(image, spec, GridSampling{}, source);
  const std::vector<FeatureVector> features = extract_all(extractor, snippets, jobs);

  Classification out;
  out.snippets.resize(snippets.size());
  parallel_for(
      snippets.size(),
      [&](std::size_t i) {
        const std::size_t c = model.assign(features[i].values);
        out.snippets[i] = {snippets[i].origin, snippets[i].geo_center, c, mapping.map[c]};
      },
      jobs);

  const GridGeometry g = grid_for_image(image, cell_size > 0.0 ? cell_size : spec.side_m);
  std::vector<std::vector<int>> votes(g.cell_count());
  for (const ClassifiedSnippet& s : out.snippets)
    if (const auto cell = g.cell_of(s.geo_center)) votes[*cell].push_back(s.label);
  out.map.grid = make_label_grid(g);
  out.map.provenance = {source};
  out.map.policy = "single";
  for (std::size_t i = 0; i < votes.size(); ++i)
    if (!votes[i].empty()) out.map.grid.values[i] = merge_labels(votes[i], mapping, MergePolicy::MaxVotes);
  return out;
}

std::optional<int> snippet_truth(const Raster<std::uint8_t>& truth, const Snippet& snippet,
                                 std::uint8_t ignore) {
  std::map<int, std::size_t> counts;
  for (std::size_t r = 0; r < snippet.pixels.rows(); ++r)
    for (std::size_t c = 0; c < snippet.pixels.cols(); ++c) {
      const std::size_t pr = snippet.origin.ping + r;
      const std::size_t pc = snippet.origin.bin + c;
      if (pr >= truth.rows() || pc >= truth.cols()) continue;
      const std::uint8_t v = truth(pr, pc);
      if (v != ignore) ++counts[v];
    }
  if (counts.empty()) return std::nullopt;
  return std::max_element(counts.begin(), counts.end(),
                          [](const auto& a, const auto& b) { return a.second < b.second; })
      ->first;
}

PrecisionReport evaluate_precision(std::span<const std::size_t> clusters, std::span<const int> truth) {
  if (clusters.empty()) throw Error(ErrorCode::EmptyInput, "no assessed snippets");
  if (clusters.size() != truth.size())
    throw Error(ErrorCode::DimensionMismatch, "cluster and truth lists differ in length");

  const std::size_t P = *std::max_element(clusters.begin(), clusters.end()) + 1;
  std::vector<std::map<int, std::size_t>> members(P);
  for (std::size_t i = 0; i < clusters.size(); ++i) ++members[clusters[i]][truth[i]];

  PrecisionReport r;
  r.cluster_majority.assign(P, -1);
  for (std::size_t c = 0; c < P; ++c) {
    std::size_t best = 0;
    for (const auto& [cls, n] : members[c])
      if (n > best) {
        best = n;
        r.cluster_majority[c] = cls;
      }
  }

  std::vector<int> classes(truth.begin(), truth.end());
  for (int m : r.cluster_majority)
    if (m >= 0) classes.push_back(m);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  r.classes = classes;
  auto pos = [&](int cls) {
    return static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), cls) - classes.begin());
  };
  r.confusion.assign(classes.size(), std::vector<std::size_t>(classes.size(), 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const int predicted = r.cluster_majority[clusters[i]];
    ++r.confusion[pos(truth[i])][pos(predicted)];
    if (predicted == truth[i]) ++correct;
  }
  r.precision = static_cast<double>(correct) / static_cast<double>(clusters.size());
  return r;
}

Json precision_to_json(const PrecisionReport& r) {
  return {{"precision", r.precision},
          {"classes", r.classes},
          {"confusion", r.confusion},
          {"cluster_majority", r.cluster_majority}};
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_fail(png_structp, png_const_charp message) {
  throw Error(ErrorCode::Io, std::string("png: ") + message);
}

void png_warn(png_structp, png_const_charp) {}

}  // namespace

void write_png(const std::filesystem::path& path, const Raster<float>& pixels) {
  if (pixels.empty()) throw Error(ErrorCode::InvalidImage, "cannot write an empty PNG");
  File f(std::fopen(path.c_str(), "wb"));
  if (!f) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::Io, "libpng initialisation failed");
  }
  try {
    png_init_io(png, f.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(pixels.cols()), static_cast<png_uint_32>(pixels.rows()), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_byte> row(pixels.cols());
    for (std::size_t r = 0; r < pixels.rows(); ++r) {
      for (std::size_t c = 0; c < pixels.cols(); ++c)
        row[c] = static_cast<png_byte>(std::lround(std::clamp(pixels(r, c), 0.0f, 1.0f) * 255.0f));
      png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
}

Raster<std::uint8_t> read_png(const std::filesystem::path& path) {
  File f(std::fopen(path.c_str(), "rb"));
  if (!f) throw Error(ErrorCode::Io, "cannot open " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::Io, "libpng initialisation failed");
  }
  Raster<std::uint8_t> out;
  try {
    png_init_io(png, f.get());
    png_read_info(png, info);
    if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY || png_get_bit_depth(png, info) != 8)
      throw Error(ErrorCode::MalformedHeader, path.string() + " is not an 8-bit grayscale PNG");
    out = Raster<std::uint8_t>(png_get_image_height(png, info), png_get_image_width(png, info));
    for (std::size_t r = 0; r < out.rows(); ++r) png_read_row(png, out.row(r).data(), nullptr);
    png_read_end(png, nullptr);
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

Json export_label_bundle(const ClusterModel& model, std::span<const Snippet> pool,
                         std::span<const Point> pool_features, std::size_t k,
                         const std::filesystem::path& dir) {
  if (pool.size() != pool_features.size())
    throw Error(ErrorCode::DimensionMismatch, "snippet pool and feature list differ in length");
  const auto reps = representatives(model, pool_features, k);
  std::error_code ec;
  std::filesystem::create_directories(dir / "snippets", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

  Json clusters = Json::array();
  for (std::size_t c = 0; c < model.P; ++c) {
    Json list = Json::array();
    for (std::size_t i = 0; i < reps[c].size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "snippets/c%03zu_%02zu.png", c, i);
      write_png(dir / name, pool[reps[c][i].index].pixels);
      list.push_back({{"file", name}, {"distance", reps[c][i].distance}});
    }
    clusters.push_back({{"id", c}, {"count", model.counts[c]}, {"snippets", list}});
  }
  Json manifest = {{"P", model.P}, {"clusters", clusters}};
  write_json(dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace seafloor
