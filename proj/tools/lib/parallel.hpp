#ifndef OPTOKERR_APP_PARALLEL_HPP
#define OPTOKERR_APP_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <optional>

namespace okerr::app {

inline constexpr const char* threads_env = "OPTOKERR_THREADS";

/// --threads if given, else $OPTOKERR_THREADS, else the hardware count (at least 1).
int resolve_threads(std::optional<int> flag);

/*
 * Runs task(i) for i in [0, n) on up to `threads` workers. Results must be
 * written to per-index slots; the first exception (lowest index) is rethrown.
 */
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& task);

}  // namespace okerr::app

#endif
