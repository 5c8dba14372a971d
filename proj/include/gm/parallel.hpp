#pragma once

#include <functional>

namespace gm {

// Runs f(i) for i in [0, n) on up to `threads` workers; rethrows the first error.
void parallel_for(int n, int threads, const std::function<void(int)>& f);

}  // namespace gm
