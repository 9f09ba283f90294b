// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

namespace dires {

// Global worker count for row-parallel loops (assembly, matvec).  Each output
// row is computed by exactly one thread in index order, so results do not
// depend on the thread count.
void set_num_threads(int n);
int num_threads();

// Runs fn(begin, end) over a static partition of [0, n).
void parallel_blocks(int n, const std::function<void(int, int)>& fn);

}  // namespace dires
