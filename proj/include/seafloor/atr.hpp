#ifndef SEAFLOOR_ATR_HPP
#define SEAFLOOR_ATR_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seafloor/insertion.hpp"
#include "seafloor/json_util.hpp"
#include "seafloor/sonar_image.hpp"

namespace seafloor {

struct Contact {
  std::size_t ping = 0;
  std::size_t bin = 0;
  GeoPoint geo;
  double confidence = 0.0;  ///< in [0, 1]
  std::string label;

  friend bool operator==(const Contact&, const Contact&) = default;
};

/// Anything that turns an image into contacts. Implementations must be
/// deterministic and safe to call concurrently.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<Contact> detect(const SidescanImage& image) const = 0;
};

struct DetectorConfig {
  std::vector<ObjectModel> models = default_object_models();
  std::size_t yaw_steps = 4;     ///< template orientations over [0, pi)
  double threshold = 0.55;       ///< minimum correlation score
  double nms_radius = 3.0;       ///< m
  double min_ground_range = 3.0; ///< m, no detections closer to the track

  /// Throws Error(InvalidParams).
  void validate() const;
};

/// Highlight-then-shadow normalised cross-correlation over the ground-range
/// corrected image, followed by greedy non-maximum suppression.
class TemplateDetector final : public Detector {
 public:
  explicit TemplateDetector(DetectorConfig config = {});
  std::vector<Contact> detect(const SidescanImage& image) const override;
  const DetectorConfig& config() const noexcept { return config_; }

 private:
  DetectorConfig config_;
};

/// Test double: diffs against the uninserted image, groups changed pixels and
/// reports each group independently with probability p.
class ChangeOracleDetector final : public Detector {
 public:
  ChangeOracleDetector(SidescanImage base, double p, std::uint64_t seed);
  std::vector<Contact> detect(const SidescanImage& image) const override;

 private:
  SidescanImage base_;
  double p_;
  std::uint64_t seed_;
};

/// Geo position of a pixel centre; nadir pixels map onto the track.
GeoPoint contact_position(const SidescanImage& image, std::size_t ping, std::size_t bin,
                          double altitude);

struct Match {
  std::size_t insertion = 0;
  std::optional<std::size_t> contact;  ///< index into the contact list, none for a miss
};

struct Association {
  std::vector<Match> matches;  ///< one per insertion, in insertion order
  std::vector<Contact> false_alarms;

  std::size_t hits() const noexcept;
};

/// Greedy one-to-one matching by ascending geo distance within `radius`.
/// Throws Error(InvalidParams) when radius <= 0.
Association associate(std::span<const Contact> contacts,
                      std::span<const InsertionRecord> insertions, double radius);

Json contacts_to_json(std::span<const Contact> contacts);
std::vector<Contact> contacts_from_json(const Json& json);

}  // namespace seafloor

#endif  // SEAFLOOR_ATR_HPP
