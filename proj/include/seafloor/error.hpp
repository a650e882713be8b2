#ifndef SEAFLOOR_ERROR_HPP
#define SEAFLOOR_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace seafloor {

enum class ErrorCode {
  // sonar_core
  InsideNadir,
  NoFirstReturn,
  ImageTooSmall,
  InvalidImage,
  MalformedHeader,
  DimensionMismatch,
  // seafloor_sim
  UnknownClass,
  InvalidParams,
  TrajectoryOutOfBounds,
  // contact_insertion
  FootprintOutsideImage,
  PlacementInfeasible,
  // performance_map
  NoTrials,
  // terrain_cluster
  DegenerateSnippet,
  TooFewSamples,
  NotSurjective,
  EntryOutOfRange,
  TooManyClasses,
  DuplicateRank,
  ExtractorMismatch,
  MappingMismatch,
  GridMismatch,
  EmptyInput,
  // mission_repair
  EmptyGrid,
  // file system / parsing
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Domain error carrying a machine-readable code. I/O failures use ErrorCode::Io.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace seafloor

#endif  // SEAFLOOR_ERROR_HPP
