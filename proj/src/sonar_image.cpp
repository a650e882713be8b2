#include "seafloor/sonar_image.hpp"

#include <algorithm>
#include <cmath>

#include "seafloor/error.hpp"

namespace seafloor {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InsideNadir: return "InsideNadir";
    case ErrorCode::NoFirstReturn: return "NoFirstReturn";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::InvalidImage: return "InvalidImage";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::TrajectoryOutOfBounds: return "TrajectoryOutOfBounds";
    case ErrorCode::FootprintOutsideImage: return "FootprintOutsideImage";
    case ErrorCode::PlacementInfeasible: return "PlacementInfeasible";
    case ErrorCode::NoTrials: return "NoTrials";
    case ErrorCode::DegenerateSnippet: return "DegenerateSnippet";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NotSurjective: return "NotSurjective";
    case ErrorCode::EntryOutOfRange: return "EntryOutOfRange";
    case ErrorCode::TooManyClasses: return "TooManyClasses";
    case ErrorCode::DuplicateRank: return "DuplicateRank";
    case ErrorCode::ExtractorMismatch: return "ExtractorMismatch";
    case ErrorCode::MappingMismatch: return "MappingMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

double distance(GeoPoint a, GeoPoint b) noexcept {
  return std::hypot(a.e - b.e, a.n - b.n);
}

std::string_view to_string(Side side) noexcept {
  switch (side) {
    case Side::Port: return "port";
    case Side::Starboard: return "starboard";
    case Side::Full: return "full";
  }
  return "starboard";
}

Side side_from_string(std::string_view text) {
  if (text == "port") return Side::Port;
  if (text == "starboard") return Side::Starboard;
  if (text == "full") return Side::Full;
  throw Error(ErrorCode::InvalidImage, "unknown side '" + std::string(text) + "'");
}

void SidescanImage::validate() const {
  if (pings() < 1 || bins() < 1)
    throw Error(ErrorCode::InvalidImage, "image must have at least one ping and one bin");
  if (!(bin_resolution > 0.0) || !(ping_resolution > 0.0))
    throw Error(ErrorCode::InvalidImage, "resolutions must be positive");
  if (nav.size() != pings())
    throw Error(ErrorCode::DimensionMismatch,
                "nav length " + std::to_string(nav.size()) + " != pings " +
                    std::to_string(pings()));
  if (side == Side::Full && bins() % 2 != 0)
    throw Error(ErrorCode::InvalidImage, "full-swath image needs an even bin count");
  if (altitude && !(*altitude > 0.0))
    throw Error(ErrorCode::InvalidImage, "altitude must be positive");
  for (float v : intensities.values())
    if (!(v >= 0.0f && v <= 1.0f))
      throw Error(ErrorCode::InvalidImage, "intensity outside [0,1]");
}

BinGeometry SidescanImage::bin_geometry(std::size_t bin) const noexcept {
  switch (side) {
    case Side::Port:
      return {-1, static_cast<double>(bin) * bin_resolution};
    case Side::Starboard:
      return {1, static_cast<double>(bin) * bin_resolution};
    case Side::Full: {
      const std::size_t half = bins() / 2;
      if (bin < half) return {-1, static_cast<double>(half - 1 - bin) * bin_resolution};
      return {1, static_cast<double>(bin - half) * bin_resolution};
    }
  }
  return {};
}

std::optional<std::size_t> SidescanImage::bin_for(SideSign side_sign,
                                                  double slant) const noexcept {
  if (slant < 0.0) return std::nullopt;
  const auto k = static_cast<std::size_t>(std::floor(slant / bin_resolution));
  const std::size_t per_side = bins_per_side();
  if (k >= per_side) return std::nullopt;
  switch (side) {
    case Side::Port:
      if (side_sign > 0) return std::nullopt;
      return k;
    case Side::Starboard:
      if (side_sign < 0) return std::nullopt;
      return k;
    case Side::Full:
      return side_sign < 0 ? per_side - 1 - k : per_side + k;
  }
  return std::nullopt;
}

GeoPoint SidescanImage::ground_position(std::size_t ping, SideSign side_sign,
                                        double ground_range) const noexcept {
  const Pose& p = nav[ping];
  // Starboard unit vector for a clockwise-from-north heading.
  const double right_e = std::cos(p.heading);
  const double right_n = -std::sin(p.heading);
  return {p.easting + side_sign * ground_range * right_e,
          p.northing + side_sign * ground_range * right_n};
}

std::vector<SideSign> SidescanImage::side_signs() const {
  switch (side) {
    case Side::Port: return {-1};
    case Side::Starboard: return {1};
    case Side::Full: return {-1, 1};
  }
  return {1};
}

double slant_to_ground(double slant_range, double altitude) {
  if (slant_range < altitude)
    throw Error(ErrorCode::InsideNadir, "slant range " + std::to_string(slant_range) +
                                            " is shorter than altitude " +
                                            std::to_string(altitude));
  return std::sqrt(slant_range * slant_range - altitude * altitude);
}

double ground_to_slant(double ground_range, double altitude) noexcept {
  return std::hypot(ground_range, altitude);
}

double estimate_altitude(const SidescanImage& image, const AltitudeConfig& config) {
  if (image.altitude) return *image.altitude;

  const std::size_t per_side = image.bins_per_side();
  const std::size_t run = std::max<std::size_t>(1, config.sustained_bins);
  std::vector<double> first_returns;
  first_returns.reserve(image.pings() * 2);
  for (std::size_t p = 0; p < image.pings(); ++p) {
    for (SideSign s : image.side_signs()) {
      std::size_t consecutive = 0;
      for (std::size_t k = 0; k < per_side; ++k) {
        const auto col = *image.bin_for(s, (static_cast<double>(k) + 0.5) * image.bin_resolution);
        if (image.intensities(p, col) > config.first_return_threshold) {
          if (++consecutive == run) {
            first_returns.push_back(static_cast<double>(k + 1 - run) * image.bin_resolution);
            break;
          }
        } else {
          consecutive = 0;
        }
      }
    }
  }
  if (first_returns.empty())
    throw Error(ErrorCode::NoFirstReturn, "no ping crosses the first-return threshold");
  const auto mid = first_returns.begin() + static_cast<std::ptrdiff_t>(first_returns.size() / 2);
  std::nth_element(first_returns.begin(), mid, first_returns.end());
  return *mid;
}

SidescanImage make_image(Raster<float> intensities, double bin_resolution,
                         double ping_resolution, std::vector<Pose> nav, Side side,
                         std::optional<double> altitude) {
  SidescanImage image;
  image.intensities = std::move(intensities);
  image.bin_resolution = bin_resolution;
  image.ping_resolution = ping_resolution;
  image.nav = std::move(nav);
  image.side = side;
  image.altitude = altitude;
  image.validate();
  return image;
}

}  // namespace seafloor
