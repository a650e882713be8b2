#ifndef SEAFLOOR_TERRAIN_CLUSTER_HPP
#define SEAFLOOR_TERRAIN_CLUSTER_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seafloor/features.hpp"
#include "seafloor/kmeans.hpp"
#include "seafloor/label_mapping.hpp"
#include "seafloor/snippet.hpp"

namespace seafloor {

struct ClassifiedSnippet {
  PixelIndex origin;
  GeoPoint geo_center;
  std::size_t cluster = 0;
  int label = kNoLabel;
};

struct Classification {
  TerrainLabelMap map;
  std::vector<ClassifiedSnippet> snippets;
};

/// Grid snippets -> features -> nearest centroid -> mapped class, written to the
/// cell under each snippet centre. Several snippets in one cell are combined by
/// vote. cell_size 0 uses the snippet edge. Throws ExtractorMismatch or
/// MappingMismatch.
Classification classify(const SidescanImage& image, const ClusterModel& model,
                        const LabelMapping& mapping, const FeatureExtractor& extractor,
                        const SnippetSpec& spec, double cell_size = 0.0,
                        const std::string& source = "image", std::size_t jobs = 0);

/// Majority truth class over a snippet window, ignoring `ignore` pixels.
std::optional<int> snippet_truth(const Raster<std::uint8_t>& truth, const Snippet& snippet,
                                 std::uint8_t ignore = 255);

struct PrecisionReport {
  double precision = 0.0;
  std::vector<int> classes;                         ///< sorted truth class ids
  std::vector<std::vector<std::size_t>> confusion;  ///< truth x cluster-majority, indexed like classes
  std::vector<int> cluster_majority;                ///< per cluster id seen, -1 when empty
};

/// Each cluster takes the majority truth of its members (ties to the lower id);
/// precision is the fraction of snippets whose cluster majority equals their truth.
/// Throws EmptyInput or DimensionMismatch.
PrecisionReport evaluate_precision(std::span<const std::size_t> clusters, std::span<const int> truth);

Json precision_to_json(const PrecisionReport& report);

/// Labelling bundle: manifest.json plus one 8-bit PNG per representative.
/// `pool` and `pool_features` are parallel arrays.
Json export_label_bundle(const ClusterModel& model, std::span<const Snippet> pool,
                         std::span<const Point> pool_features, std::size_t k,
                         const std::filesystem::path& dir);

/// Grayscale 8-bit PNG of values in [0, 1].
void write_png(const std::filesystem::path& path, const Raster<float>& pixels);
Raster<std::uint8_t> read_png(const std::filesystem::path& path);

}  // namespace seafloor

#endif  // SEAFLOOR_TERRAIN_CLUSTER_HPP
