#ifndef SEAFLOOR_SIDESCAN_SIM_HPP
#define SEAFLOOR_SIDESCAN_SIM_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "seafloor/random.hpp"
#include "seafloor/raster.hpp"
#include "seafloor/sonar_image.hpp"
#include "seafloor/terrain.hpp"

namespace seafloor {

/// Acquisition geometry and the radiometric model of the rendered sonar.
struct SensorModel {
  double altitude = 10.0;
  double max_slant_range = 50.0;
  double bin_resolution = 0.05;
  double ping_resolution = 0.1;
  double speckle_strength = 0.6;     ///< scales multiplicative speckle and the noise floor
  double beam_attenuation = 0.02;    ///< 1/m, two-way amplitude loss exp(-beta * slant)
  double tvg_compensation = 0.6;     ///< fraction of the range falloff undone by TVG, < 1
  double noise_floor = 0.1;          ///< mean additive noise intensity at speckle strength 1
  double shadow_floor = 0.02;        ///< intensity of acoustic shadow before noise
  double ground_step = 0.0;          ///< ray sample spacing, m; 0 picks half the finest resolution
  Side side = Side::Starboard;

  /// Throws Error(InvalidParams).
  void validate() const;
  std::size_t bins_per_side() const;
};

/// Radiometric gain applied to backscatter * cos(incidence) at a slant range:
/// exp(-beta s) attenuation and the residual left by partial TVG.
double range_gain(double slant, const SensorModel& sensor) noexcept;

/// Per-sample occlusion along one ping's ground-range profile. Sample 0 must be
/// nearest the sensor and ground ranges must increase. A sample is shadowed when
/// the depression tangent (altitude - z) / r exceeds the minimum over nearer samples.
std::vector<std::uint8_t> occlusion_mask(std::span<const double> ground_ranges,
                                         std::span<const double> heights, double altitude);

/// Averages ray samples into slant bins.
class SlantAccumulator {
 public:
  SlantAccumulator(std::size_t bins, double bin_resolution);
  void add(double slant, double value, bool shadowed);
  std::size_t count(std::size_t bin) const { return counts_[bin]; }
  double mean(std::size_t bin) const {
    return counts_[bin] ? sums_[bin] / static_cast<double>(counts_[bin]) : 0.0;
  }
  double shadow_fraction(std::size_t bin) const {
    return counts_[bin] ? static_cast<double>(shadows_[bin]) / static_cast<double>(counts_[bin]) : 0.0;
  }
  std::size_t bins() const { return counts_.size(); }

 private:
  double resolution_;
  std::vector<double> sums_;
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> shadows_;
};

/// Speckle and additive noise for one pixel. Draws exactly two variates.
float apply_noise(double clean, const SensorModel& sensor, Rng& rng) noexcept;

struct RenderedSidescan {
  SidescanImage image;
  Raster<std::uint8_t> truth;  ///< terrain class per pixel, kNadirTruth inside the nadir gap
};

/// Ray-traced sidescan image of a terrain along a trajectory. Pings are
/// independent and counter-seeded, so the output does not depend on job count.
/// Throws TrajectoryOutOfBounds or InvalidParams.
RenderedSidescan render_sidescan(const TerrainPatch& terrain, std::span<const Pose> trajectory,
                                 const SensorModel& sensor, std::uint64_t seed);

/// Straight-line trajectory of `pings` poses starting at `start`.
std::vector<Pose> straight_track(GeoPoint start, double heading, std::size_t pings,
                                 double ping_resolution);

}  // namespace seafloor

#endif  // SEAFLOOR_SIDESCAN_SIM_HPP
