#ifndef SEAFLOOR_TERRAIN_HPP
#define SEAFLOOR_TERRAIN_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "seafloor/raster.hpp"
#include "seafloor/sonar_image.hpp"

namespace seafloor {

/// Terrain archetypes rendered by the simulator. Values double as class ids.
enum class TerrainClass : std::uint8_t {
  FlatSand = 0,
  Mud = 1,
  SandRipples = 2,
  Clutter = 3,
  MarineGrowth = 4,
  RockOutcrop = 5,
};

inline constexpr std::size_t kTerrainClassCount = 6;
inline constexpr std::uint8_t kNadirTruth = 255;

struct ClassInfo {
  std::uint8_t id;
  std::string name;
};

/// The six archetypes, ordered by id.
const std::vector<ClassInfo>& terrain_catalog();
std::string_view terrain_name(TerrainClass c) noexcept;
/// Throws Error(UnknownClass).
TerrainClass terrain_from_id(int id);
TerrainClass terrain_from_name(std::string_view name);

struct RippleParams {
  double wavelength = 1.0;   ///< m
  double amplitude = 0.06;   ///< m, half crest-to-trough
  double orientation = 0.0;  ///< crest-line direction, rad clockwise from north
  double phase_jitter = 0.3; ///< rad, slow phase meander
};

struct ClutterParams {
  double density = 0.6;  ///< rocks per m^2
  double min_radius = 0.12;
  double max_radius = 0.35;
  double min_height = 0.08;
  double max_height = 0.25;
  double rock_backscatter = 0.75;
};

struct GrowthParams {
  double coverage = 0.65;    ///< fraction of seafloor under growth
  double patch_scale = 0.8;  ///< m, base feature size
  double height = 0.25;      ///< m, canopy height
  double backscatter = 0.8;
};

struct OutcropParams {
  double relief = 2.0;  ///< m, amplitude of large-scale relief
  double scale = 6.0;   ///< m, base feature size
  double roughness = 0.03;
  double backscatter = 0.6;
};

struct TerrainParams {
  double resolution = 0.05;  ///< m per cell
  double sand_backscatter = 0.45;
  double mud_backscatter = 0.08;
  double sand_roughness = 0.004;  ///< m stddev
  double mud_roughness = 0.002;
  RippleParams ripples;
  ClutterParams clutter;
  GrowthParams growth;
  OutcropParams outcrop;
};

/// Discrete object placed by the clutter archetype.
struct TerrainFeature {
  GeoPoint centre;
  double radius_major = 0.0;
  double radius_minor = 0.0;
  double angle = 0.0;
  double height = 0.0;
};

/// Ground-truth seafloor over a rectangular geo extent. Row 0 is the southern row.
struct TerrainPatch {
  GeoPoint origin;  ///< south-west corner
  double resolution = 0.05;
  Raster<float> height;        ///< m above datum
  Raster<float> backscatter;   ///< [0, 1]
  Raster<std::uint8_t> truth;  ///< TerrainClass ids
  std::vector<ClassInfo> class_catalog;
  std::vector<TerrainFeature> features;

  double width_m() const noexcept { return static_cast<double>(height.cols()) * resolution; }
  double height_m() const noexcept { return static_cast<double>(height.rows()) * resolution; }
  bool contains(GeoPoint p) const noexcept;

  /// Bilinear height with edge clamping.
  double height_at(GeoPoint p) const noexcept;
  /// Height and its east/north gradient.
  void height_and_gradient(GeoPoint p, double& z, double& dzde, double& dzdn) const noexcept;
  double backscatter_at(GeoPoint p) const noexcept;
  std::uint8_t truth_at(GeoPoint p) const noexcept;
};

/// Deterministic per seed. Throws UnknownClass or InvalidParams.
TerrainPatch generate_terrain(TerrainClass kind, double extent_e, double extent_n,
                              const TerrainParams& params, std::uint64_t seed,
                              GeoPoint origin = {});

/// Smooth lattice noise in [-1, 1], summed over octaves.
double value_noise(double x, double y, double scale, int octaves, std::uint64_t seed) noexcept;

}  // namespace seafloor

#endif  // SEAFLOOR_TERRAIN_HPP
