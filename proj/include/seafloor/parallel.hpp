#ifndef SEAFLOOR_PARALLEL_HPP
#define SEAFLOOR_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace seafloor {

/// Worker cap used when a call does not pass one explicitly. Initialised from
/// SEAFLOOR_JOBS, falling back to the hardware thread count.
std::size_t default_jobs() noexcept;
void set_default_jobs(std::size_t jobs) noexcept;

/// Runs fn(i) for i in [0, n). Work items must be independent; results must not
/// depend on which worker ran them. Rethrows the first exception after joining.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t jobs = 0);

}  // namespace seafloor

#endif  // SEAFLOOR_PARALLEL_HPP
