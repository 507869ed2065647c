#pragma once

#include <cstddef>
#include <functional>

namespace possfuse {

// Worker count: POSSFUSE_THREADS if set to a positive integer, otherwise
// std::thread::hardware_concurrency(), and never less than 1.
std::size_t thread_count();

// Calls body(i) for every i in [0, n), spread over thread_count() threads
// in contiguous chunks. body must only write state owned by index i.
// Exceptions from body are rethrown on the calling thread (the first one
// by index wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace possfuse
