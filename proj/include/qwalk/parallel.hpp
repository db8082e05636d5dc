#pragma once

#include <cstddef>
#include <functional>

namespace qw {

// Worker cap for every internal parallel map. Defaults to $QWALK_THREADS, else
// the hardware concurrency. Results never depend on this value: each index
// writes its own slot and reductions run serially afterwards.
std::size_t thread_count();
void set_thread_count(std::size_t n);  // 0 restores the default

// Calls body(i) for i in [0, n) using up to thread_count() threads. Exceptions
// thrown by body are rethrown on the calling thread (lowest index wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qw
