#ifndef SEAFLOOR_PERFORMANCE_MAP_HPP
#define SEAFLOOR_PERFORMANCE_MAP_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "seafloor/atr.hpp"
#include "seafloor/geo_grid.hpp"
#include "seafloor/insertion.hpp"
#include "seafloor/json_util.hpp"

namespace seafloor {

struct MonteCarloConfig {
  std::size_t passes = 10;
  std::size_t contacts_per_pass = 10;
  double association_radius = 2.0;  ///< m
  double cell_size = 5.0;           ///< m
  std::uint64_t seed = 1;
  double min_separation = 0.0;      ///< m; 0 picks twice the longest object extent
  bool keep_pass_maps = false;
  InsertionConfig insertion;
  std::size_t jobs = 0;             ///< 0 uses default_jobs()

  /// Throws Error(InvalidParams).
  void validate() const;
};

struct TrialOutcome {
  InsertionRecord record;
  bool detected = false;
  double confidence = 0.0;               ///< of the matched contact, 0 for a miss
  std::optional<int> terrain_class;      ///< from the truth raster when supplied

  friend bool operator==(const TrialOutcome&, const TrialOutcome&) = default;
};

/// Everything one insertion + detection pass contributes.
struct PassResult {
  std::uint32_t pass = 0;
  std::vector<TrialOutcome> outcomes;
  std::uint64_t false_alarms = 0;
};

struct PerformanceMap {
  GridGeometry geometry;
  std::vector<std::uint32_t> successes;  ///< per cell
  std::vector<std::uint32_t> trials;
  std::uint64_t false_alarms = 0;
  std::size_t passes = 0;
  double ensonified_hectares = 0.0;
  std::vector<TrialOutcome> outcomes;    ///< sorted by (pass, ping, ground range)
  std::vector<FlagGrid> pass_maps;       ///< 1 detected, 0 missed, 255 untried

  /// False alarms per hectare per pass.
  double fad() const noexcept;
  /// successes / trials per cell, NaN where untried.
  PdGrid pd() const;
  /// Pooled PD over all trials; NaN when there are none.
  double global_pd() const noexcept;
  std::size_t total_trials() const noexcept;
};

/// Ensonified seafloor area of an image (ground swath x track length), m^2.
double ensonified_area(const SidescanImage& image);

/// One pass: random insertion, detection and association.
PassResult run_pass(const SidescanImage& image, std::span<const ObjectModel> models,
                    const Detector& detector, const MonteCarloConfig& config,
                    std::uint32_t pass, const Raster<std::uint8_t>* truth = nullptr);

/// Folds pass results into a map. The result does not depend on their order.
PerformanceMap merge_passes(const SidescanImage& image, const MonteCarloConfig& config,
                            std::vector<PassResult> results);

/// N independent passes, run in parallel. Propagates PlacementInfeasible.
PerformanceMap run_monte_carlo(const SidescanImage& image, std::span<const ObjectModel> models,
                               const Detector& detector, const MonteCarloConfig& config,
                               const Raster<std::uint8_t>* truth = nullptr);

struct PdTally {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double pd() const noexcept;
};

/// Pooled PD per terrain class over outcomes that carry one.
std::map<int, PdTally> per_class_pd(std::span<const TrialOutcome> outcomes);

/// Fills no-data cells by inverse-distance weighting from the k nearest
/// trialed cells. Throws Error(NoTrials) when no cell carries data.
PdGrid densify(const PdGrid& pd, std::size_t k = 4, double power = 2.0);

/// 1 where PD < threshold; no-data cells are never flagged.
FlagGrid binarize(const PdGrid& pd, double threshold);

Json performance_report(const PerformanceMap& map);

}  // namespace seafloor

#endif  // SEAFLOOR_PERFORMANCE_MAP_HPP
