#ifndef SEAFLOOR_KMEANS_HPP
#define SEAFLOOR_KMEANS_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "seafloor/features.hpp"
#include "seafloor/json_util.hpp"

namespace seafloor {

using Point = std::vector<double>;

struct ExtractorInfo {
  std::string id;
  Json config;
  std::uint64_t hash = 0;

  static ExtractorInfo of(const FeatureExtractor& extractor);
};

struct TrainingLog {
  std::size_t epochs = 0;
  double final_shift = 0.0;  ///< max centroid displacement over the last epoch
  std::size_t samples = 0;
  double inertia = 0.0;      ///< sum of squared normalised distances at the end
};

/// Per-dimension z-score statistics.
struct Normaliser {
  std::vector<double> means;
  std::vector<double> scales;  ///< > 0; 1 for constant dimensions

  /// Welford pass over the samples. Throws Error(EmptyInput).
  static Normaliser fit(std::span<const Point> samples);
  Point apply(std::span<const double> x) const;
};

struct ClusterModel {
  std::size_t P = 0;
  std::vector<Point> centroids;  ///< normalised feature space
  std::vector<std::uint64_t> counts;
  ExtractorInfo extractor;
  Normaliser norm;
  TrainingLog log;

  /// Nearest centroid for an already normalised point; ties go to the lower index.
  std::size_t nearest(std::span<const double> normalised, double* squared_distance = nullptr) const;
  /// Nearest centroid for a raw feature vector.
  std::size_t assign(std::span<const double> features) const;
  /// Centroid mapped back to raw feature units.
  Point raw_centroid(std::size_t i) const;

  /// Throws Error(InvalidParams) on broken invariants.
  void validate() const;
};

struct KMeansConfig {
  std::size_t P = 20;
  std::size_t batch_size = 256;
  std::size_t max_epochs = 50;
  double tolerance = 1e-3;
  std::uint64_t seed = 1;
};

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

/// k-means++ seeding over the given points.
std::vector<Point> kmeans_pp(std::span<const Point> points, std::size_t P, std::uint64_t seed);

/// Seed batch drawn from the normalised data and the k-means++ centroids the
/// trainer starts from.
std::vector<Point> initial_centroids(std::span<const Point> normalised, const KMeansConfig& config);

/// Mini-batch k-means with per-centroid 1/count learning rates. Stops when the
/// largest centroid displacement over an epoch drops below the tolerance.
/// Throws Error(TooFewSamples) when there are fewer samples than clusters.
ClusterModel train_clusterer(std::span<const Point> features, const KMeansConfig& config,
                             ExtractorInfo extractor = {});

double inertia(std::span<const Point> normalised, std::span<const Point> centroids);

struct Representative {
  std::size_t index = 0;  ///< into the pool
  double distance = 0.0;  ///< normalised feature distance to the centroid
};

/// Per cluster, the k closest members of the pool in ascending distance.
std::vector<std::vector<Representative>> representatives(const ClusterModel& model,
                                                         std::span<const Point> pool, std::size_t k);

Json model_to_json(const ClusterModel& model);
ClusterModel model_from_json(const Json& json);
void write_model(const std::filesystem::path& path, const ClusterModel& model);
ClusterModel read_model(const std::filesystem::path& path);

/// Throws Error(ExtractorMismatch) unless the extractor matches the model's.
void check_extractor(const ClusterModel& model, const FeatureExtractor& extractor);

}  // namespace seafloor

#endif  // SEAFLOOR_KMEANS_HPP
