#ifndef SEAFLOOR_SONAR_IMAGE_HPP
#define SEAFLOOR_SONAR_IMAGE_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seafloor/raster.hpp"

namespace seafloor {

struct GeoPoint {
  double e = 0.0;  ///< easting, m
  double n = 0.0;  ///< northing, m

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

double distance(GeoPoint a, GeoPoint b) noexcept;

/// Vehicle pose for one ping. Heading is clockwise from north, radians.
struct Pose {
  double easting = 0.0;
  double northing = 0.0;
  double heading = 0.0;

  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Which side(s) of the vehicle the image covers.
///
/// Single-side images store the nearest slant range in bin 0. A full swath
/// stores `bins/2` port bins (farthest first) followed by the starboard bins,
/// so the nadir sits in the middle columns.
enum class Side { Port, Starboard, Full };

std::string_view to_string(Side side) noexcept;
Side side_from_string(std::string_view text);

/// +1 for starboard, -1 for port.
using SideSign = int;

struct BinGeometry {
  SideSign side = 1;
  double slant = 0.0;  ///< slant range of the bin's near edge, m
};

/// Ping-major sidescan intensity raster with navigation and range geometry.
struct SidescanImage {
  Raster<float> intensities;  ///< pings x bins, values in [0, 1]
  double bin_resolution = 0.05;
  double ping_resolution = 0.1;
  std::optional<double> altitude;
  std::vector<Pose> nav;
  Side side = Side::Starboard;

  std::size_t pings() const noexcept { return intensities.rows(); }
  std::size_t bins() const noexcept { return intensities.cols(); }

  /// Bins covering one side of the swath.
  std::size_t bins_per_side() const noexcept {
    return side == Side::Full ? bins() / 2 : bins();
  }

  /// Throws Error(InvalidImage) when an invariant does not hold.
  void validate() const;

  BinGeometry bin_geometry(std::size_t bin) const noexcept;

  /// Column holding the given side/slant, if it exists in this image.
  std::optional<std::size_t> bin_for(SideSign side_sign, double slant) const noexcept;

  /// Seafloor position at a ground range off one side of a ping.
  GeoPoint ground_position(std::size_t ping, SideSign side_sign,
                           double ground_range) const noexcept;

  /// Sides present in this image (one or two entries).
  std::vector<SideSign> side_signs() const;

  friend bool operator==(const SidescanImage&, const SidescanImage&) = default;
};

/// Horizontal range for a slant range over a flat seafloor.
/// Throws Error(InsideNadir) when slant_range < altitude.
double slant_to_ground(double slant_range, double altitude);

/// Inverse of slant_to_ground.
double ground_to_slant(double ground_range, double altitude) noexcept;

struct AltitudeConfig {
  float first_return_threshold = 0.1f;
  std::size_t sustained_bins = 3;
};

/// Sensor height above the seafloor. Returns the metadata altitude when
/// present; otherwise the median first-return slant over pings.
double estimate_altitude(const SidescanImage& image, const AltitudeConfig& config = {});

/// Intensity raster plus the sidecar fields, as stored on disk.
SidescanImage make_image(Raster<float> intensities, double bin_resolution,
                         double ping_resolution, std::vector<Pose> nav,
                         Side side = Side::Starboard,
                         std::optional<double> altitude = std::nullopt);

}  // namespace seafloor

#endif  // SEAFLOOR_SONAR_IMAGE_HPP
