#ifndef SEAFLOOR_TEST_SUPPORT_HPP
#define SEAFLOOR_TEST_SUPPORT_HPP

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "seafloor/mission_set.hpp"
#include "seafloor/sidescan_sim.hpp"
#include "seafloor/sonar_image.hpp"

namespace testing {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("seafloor_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const noexcept { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

// Northbound starboard image with a constant value past the nadir gap.
inline seafloor::SidescanImage constant_image(std::size_t pings, std::size_t bins, float value,
                                              double altitude = 10.0, double bin_res = 0.05,
                                              double ping_res = 0.1) {
  seafloor::Raster<float> r(pings, bins, 0.0f);
  for (std::size_t p = 0; p < pings; ++p)
    for (std::size_t b = 0; b < bins; ++b)
      if ((static_cast<double>(b) + 0.5) * bin_res >= altitude) r(p, b) = value;
  auto nav = seafloor::straight_track({0.0, 0.0}, 0.0, pings, ping_res);
  return seafloor::make_image(std::move(r), bin_res, ping_res, std::move(nav),
                              seafloor::Side::Starboard, altitude);
}

inline seafloor::Mission small_mission(seafloor::TerrainClass kind, std::size_t pings,
                                       std::uint64_t seed, double max_slant = 50.0) {
  seafloor::MissionSetConfig cfg;
  cfg.pings = pings;
  cfg.sensor.max_slant_range = max_slant;
  return seafloor::simulate_mission(kind, cfg, seed);
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommandResult {
  int exit = -1;
  std::string out;
  std::string err;
};

// Runs `program args` through the shell; stdout and stderr land in `scratch`.
inline CommandResult run_command(const std::string& program, const std::string& args, const fs::path& scratch) {
  const fs::path out = scratch / "stdout.txt";
  const fs::path err = scratch / "stderr.txt";
  const std::string cmd = "'" + program + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  CommandResult r;
  r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace testing

#endif  // SEAFLOOR_TEST_SUPPORT_HPP
