#pragma once

#include <cstddef>
#include <functional>

namespace mvpb {

/// Runs fn(i) for every i in [0, n) across up to `threads` workers (0 means
/// the hardware count). Indices are partitioned statically; callers keep
/// results deterministic by writing into per-index slots and reducing in
/// index order afterwards. The first exception thrown by fn is rethrown.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace mvpb
