#ifndef SEAFLOOR_INSERTION_HPP
#define SEAFLOOR_INSERTION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seafloor/json_util.hpp"
#include "seafloor/raster.hpp"
#include "seafloor/snippet.hpp"
#include "seafloor/sonar_image.hpp"

namespace seafloor {

/// Target shape as a heightfield in its own frame: rows run along the
/// object's long axis (u), columns across it (v), centred on the footprint.
struct ObjectModel {
  std::string name;
  Raster<float> heightfield;
  double resolution = 0.02;   ///< m per heightfield cell
  double reflectivity = 1.8;  ///< backscatter relative to the surrounding seafloor

  double length() const noexcept { return static_cast<double>(heightfield.rows()) * resolution; }
  double width() const noexcept { return static_cast<double>(heightfield.cols()) * resolution; }
  double max_height() const noexcept;
  /// Radius of the circle enclosing the footprint.
  double bounding_radius() const noexcept;
  /// Bilinear height at object coordinates (m); zero outside the footprint.
  double height_at(double u, double v) const noexcept;
  /// Throws Error(InvalidParams).
  void validate() const;
};

/// Cylinder lying on the seafloor with its axis along u.
ObjectModel make_cylinder(double length, double diameter, double resolution = 0.02);
/// Upright truncated cone; equal radii give a flat-topped drum.
ObjectModel make_truncated_cone(double base_radius, double top_radius, double height,
                                double resolution = 0.02);
/// Ramp rising across the footprint (v), constant along u.
ObjectModel make_wedge(double length, double width, double height, double resolution = 0.02);
/// Sphere resting on the seafloor.
ObjectModel make_sphere(double radius, double resolution = 0.02);

/// The default object set: a 2 m x 0.5 m cylinder and a 1 m wide truncated cone.
std::vector<ObjectModel> default_object_models();

/// Where a contact sits: ping, ground range, and image side.
struct ContactLocation {
  std::size_t ping = 0;
  double ground_range = 0.0;
  SideSign side = 1;
};

struct InsertionRecord {
  std::string object;
  std::size_t ping = 0;
  double ground_range = 0.0;
  SideSign side = 1;
  double yaw = 0.0;  ///< long axis relative to the track direction, rad
  std::uint32_t pass = 0;
  GeoPoint geo;

  friend bool operator==(const InsertionRecord&, const InsertionRecord&) = default;
};

enum class PixelKind : std::uint8_t { Highlight, Shadow };

struct AffectedPixel {
  PixelIndex pixel;
  PixelKind kind = PixelKind::Highlight;
};

/// Seafloor-level shadow cast on one ping, in ground range.
struct PingShadow {
  std::size_t ping = 0;
  double start = 0.0;  ///< first shadowed seafloor sample
  double end = 0.0;    ///< far edge of the last shadowed seafloor sample
};

struct InsertionConfig {
  double shadow_floor = 0.02;  ///< intensity of acoustic shadow before noise
  double ring_width = 1.0;     ///< m, background annulus used for grain matching
  double ray_step = 0.0;       ///< m; 0 picks a quarter bin
  double min_ground_range = 5.0;  ///< random placement stays beyond this range
};

struct InsertionResult {
  SidescanImage image;
  InsertionRecord record;
  std::vector<AffectedPixel> pixels;
  std::vector<PingShadow> shadows;
};

/// Inserts one object into a copy of the image. Throws FootprintOutsideImage
/// or InsideNadir when the footprint leaves the ensonified region.
InsertionResult insert_contact(const SidescanImage& image, const ObjectModel& model,
                               const ContactLocation& at, double yaw, std::uint64_t seed,
                               const InsertionConfig& config = {});

/// In-place variant used by the batch paths.
InsertionResult insert_contact_in_place(SidescanImage& image, const ObjectModel& model,
                                        const ContactLocation& at, double yaw, std::uint64_t seed,
                                        const InsertionConfig& config = {});

struct RandomInsertion {
  SidescanImage image;
  std::vector<InsertionRecord> records;
};

/// Uniform rejection-sampled placement with pairwise geo separation.
/// Throws PlacementInfeasible when the count cannot be placed.
RandomInsertion insert_random_contacts(const SidescanImage& image,
                                       std::span<const ObjectModel> models, std::size_t count,
                                       double min_separation, std::uint64_t seed,
                                       std::uint32_t pass = 0, const InsertionConfig& config = {});

/// Twice the longest object extent.
double default_min_separation(std::span<const ObjectModel> models);

Json records_to_json(std::span<const InsertionRecord> records);
/// Throws MalformedHeader.
std::vector<InsertionRecord> records_from_json(const Json& json);

}  // namespace seafloor

#endif  // SEAFLOOR_INSERTION_HPP
