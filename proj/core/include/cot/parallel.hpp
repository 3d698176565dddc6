#pragma once

#include <cstddef>
#include <functional>

namespace cot {

// Environment variable read when a solver is asked for 0 threads.
inline constexpr const char* kThreadsEnvVar = "COT_NUM_THREADS";

// Value of COT_NUM_THREADS, or 1 if unset or invalid.
std::size_t threads_from_env();

// Splits [0, count) into contiguous chunks, one per worker, and calls
// body(begin, end, worker) for each. Runs inline when threads <= 1.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace cot
