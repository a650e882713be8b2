#include "seafloor/sidescan_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seafloor/error.hpp"
#include "seafloor/parallel.hpp"

namespace seafloor {

void SensorModel::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidParams, what);
  };
  require(altitude > 0.0, "sensor altitude must be positive");
  require(max_slant_range > altitude, "max slant range must exceed altitude");
  require(bin_resolution > 0.0 && ping_resolution > 0.0, "resolutions must be positive");
  require(speckle_strength >= 0.0, "speckle strength must be non-negative");
  require(beam_attenuation >= 0.0, "beam attenuation must be non-negative");
  require(tvg_compensation >= 0.0 && tvg_compensation < 1.0, "TVG compensation must be in [0,1)");
  require(noise_floor >= 0.0 && shadow_floor >= 0.0, "noise and shadow floors must be non-negative");
  require(ground_step >= 0.0, "ground step must be non-negative");
}

std::size_t SensorModel::bins_per_side() const {
  return static_cast<std::size_t>(std::ceil(max_slant_range / bin_resolution - 1e-9));
}

double range_gain(double slant, const SensorModel& sensor) noexcept {
  const double a = sensor.altitude;
  const double beta = sensor.beam_attenuation;
  const double k = sensor.tvg_compensation;
  // TVG undoes a fraction k of the attenuation and of the flat-seafloor
  // Lambertian falloff a/s, normalised to unity directly below the sensor.
  const double tvg = std::exp(k * beta * (slant - a)) * std::pow(slant / a, k);
  return std::exp(-beta * (slant - a)) * tvg;
}

std::vector<std::uint8_t> occlusion_mask(std::span<const double> ground_ranges,
                                         std::span<const double> heights, double altitude) {
  std::vector<std::uint8_t> shadowed(ground_ranges.size(), 0);
  double min_tangent = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ground_ranges.size(); ++k) {
    const double r = ground_ranges[k];
    const double t = r > 0.0 ? (altitude - heights[k]) / r : std::numeric_limits<double>::infinity();
    if (t > min_tangent) {
      shadowed[k] = 1;
    } else {
      min_tangent = t;
    }
  }
  return shadowed;
}

SlantAccumulator::SlantAccumulator(std::size_t bins, double bin_resolution)
    : resolution_(bin_resolution), sums_(bins, 0.0), counts_(bins, 0), shadows_(bins, 0) {}

void SlantAccumulator::add(double slant, double value, bool shadowed) {
  if (slant < 0.0) return;
  const auto k = static_cast<std::size_t>(slant / resolution_);
  if (k >= counts_.size()) return;
  ++counts_[k];
  if (shadowed)
    ++shadows_[k];
  else
    sums_[k] += value;
}

float apply_noise(double clean, const SensorModel& sensor, Rng& rng) noexcept {
  const double e1 = rng.exponential();
  const double e2 = rng.exponential();
  const double s = sensor.speckle_strength;
  const double v = clean * (1.0 + s * (e1 - 1.0)) + s * sensor.noise_floor * e2;
  return static_cast<float>(std::clamp(v, 0.0, 1.0));
}

std::vector<Pose> straight_track(GeoPoint start, double heading, std::size_t pings,
                                 double ping_resolution) {
  std::vector<Pose> track(pings);
  for (std::size_t i = 0; i < pings; ++i) {
    const double d = static_cast<double>(i) * ping_resolution;
    track[i] = {start.e + d * std::sin(heading), start.n + d * std::cos(heading), heading};
  }
  return track;
}

RenderedSidescan render_sidescan(const TerrainPatch& terrain, std::span<const Pose> trajectory,
                                 const SensorModel& sensor, std::uint64_t seed) {
  sensor.validate();
  if (trajectory.empty()) throw Error(ErrorCode::InvalidParams, "trajectory is empty");
  const double a = sensor.altitude;
  const float max_height = terrain.height.empty()
                               ? 0.0f
                               : *std::max_element(terrain.height.values().begin(),
                                                   terrain.height.values().end());
  if (max_height >= a) throw Error(ErrorCode::InvalidParams, "terrain reaches the sensor altitude");

  const std::size_t per_side = sensor.bins_per_side();
  const double lowest_dz = a - std::max(0.0, static_cast<double>(max_height));
  const double max_ground = std::sqrt(std::max(0.0, sensor.max_slant_range * sensor.max_slant_range -
                                                        lowest_dz * lowest_dz));
  const double step = sensor.ground_step > 0.0
                          ? sensor.ground_step
                          : 0.5 * std::min(sensor.bin_resolution, terrain.resolution);
  const auto samples = static_cast<std::size_t>(std::ceil(max_ground / step)) + 1;

  RenderedSidescan out;
  SidescanImage& image = out.image;
  image.bin_resolution = sensor.bin_resolution;
  image.ping_resolution = sensor.ping_resolution;
  image.altitude = a;
  image.side = sensor.side;
  image.nav.assign(trajectory.begin(), trajectory.end());
  const std::size_t bins = sensor.side == Side::Full ? 2 * per_side : per_side;
  image.intensities = Raster<float>(trajectory.size(), bins);
  out.truth = Raster<std::uint8_t>(trajectory.size(), bins, kNadirTruth);

  const std::vector<SideSign> sides = image.side_signs();
  for (std::size_t p = 0; p < trajectory.size(); ++p)
    for (SideSign s : sides)
      for (double r : {0.0, max_ground})
        if (!terrain.contains(image.ground_position(p, s, r)))
          throw Error(ErrorCode::TrajectoryOutOfBounds,
                      "ping " + std::to_string(p) + " swath leaves the terrain extent");

  parallel_for(trajectory.size(), [&](std::size_t p) {
    const Pose& pose = trajectory[p];
    Rng rng(mix_seed(seed, {0x50494E47u, p}));
    std::vector<double> ranges(samples);
    std::vector<double> heights(samples);
    std::vector<GeoPoint> points(samples);
    std::vector<double> slopes_e(samples);
    std::vector<double> slopes_n(samples);
    for (SideSign s : sides) {
      for (std::size_t k = 0; k < samples; ++k) {
        ranges[k] = static_cast<double>(k) * step;
        points[k] = image.ground_position(p, s, ranges[k]);
        terrain.height_and_gradient(points[k], heights[k], slopes_e[k], slopes_n[k]);
      }
      const auto shadowed = occlusion_mask(ranges, heights, a);

      SlantAccumulator acc(per_side, sensor.bin_resolution);
      double min_slant = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < samples; ++k) {
        const double dz = a - heights[k];
        const double slant = std::hypot(ranges[k], dz);
        min_slant = std::min(min_slant, slant);
        if (shadowed[k]) {
          acc.add(slant, 0.0, true);
          continue;
        }
        const double ne = -slopes_e[k];
        const double nn = -slopes_n[k];
        const double norm = std::sqrt(ne * ne + nn * nn + 1.0);
        const double ve = (pose.easting - points[k].e) / slant;
        const double vn = (pose.northing - points[k].n) / slant;
        const double vz = dz / slant;
        const double cos_inc = std::max(0.0, (ne * ve + nn * vn + vz) / norm);
        const double value = terrain.backscatter_at(points[k]) * cos_inc * range_gain(slant, sensor);
        acc.add(slant, value, false);
      }

      for (std::size_t k = 0; k < per_side; ++k) {
        const double bin_slant = static_cast<double>(k) * sensor.bin_resolution;
        double clean = 0.0;
        if (acc.count(k) > 0) {
          clean = acc.mean(k) + acc.shadow_fraction(k) * sensor.shadow_floor;
        } else if (bin_slant + sensor.bin_resolution > min_slant) {
          clean = sensor.shadow_floor;  // beyond first return but no ray landed here
        }
        const std::size_t col = *image.bin_for(s, bin_slant + 0.5 * sensor.bin_resolution);
        image.intensities(p, col) = apply_noise(clean, sensor, rng);

        const double centre = bin_slant + 0.5 * sensor.bin_resolution;
        if (centre >= a)
          out.truth(p, col) = terrain.truth_at(image.ground_position(p, s, std::sqrt(centre * centre - a * a)));
      }
    }
  });
  return out;
}

}  // namespace seafloor
