#pragma once

#include <cstddef>
#include <functional>

namespace lpkdv {

/// Worker count used by data-parallel loops. Defaults to 1.
void set_thread_count(unsigned k);
unsigned thread_count();

/// Runs body(i) for i in [begin, end), split into contiguous chunks over
/// thread_count() workers. Bodies must only write to disjoint outputs.
/// Exceptions thrown by a body are rethrown after all workers join; when
/// several bodies throw, the one with the lowest index wins so the error
/// reported does not depend on scheduling.
void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end,
                  const std::function<void(std::ptrdiff_t)>& body);

}  // namespace lpkdv
