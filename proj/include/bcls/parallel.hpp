#ifndef BCLS_PARALLEL_HPP
#define BCLS_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace bcls {

/// Process-wide worker limit; 0 means one per hardware thread.
void set_max_threads(unsigned threads);
unsigned max_threads();

/// Runs body(0..count-1) on up to max_threads() workers. Calls made from
/// inside a worker run serially, so nested loops never oversubscribe.
/// Results must be written to per-index slots; iteration order is unspecified.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace bcls

#endif
