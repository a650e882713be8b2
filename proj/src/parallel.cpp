#include "seafloor/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace seafloor {
namespace {

std::size_t initial_jobs() noexcept {
  if (const char* env = std::getenv("SEAFLOOR_JOBS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<std::size_t>& jobs_setting() noexcept {
  static std::atomic<std::size_t> jobs{initial_jobs()};
  return jobs;
}

}  // namespace

std::size_t default_jobs() noexcept { return jobs_setting().load(); }

void set_default_jobs(std::size_t jobs) noexcept { jobs_setting().store(std::max<std::size_t>(1, jobs)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, std::size_t jobs) {
  if (jobs == 0) jobs = default_jobs();
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace seafloor
