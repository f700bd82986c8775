#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace muskat {

/// Worker count used by the O(N^2) kernels. Defaults to the hardware count.
void set_thread_count(int count);
int thread_count();
int max_thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunk boundaries
/// depend on the thread count, so bodies must not reduce across indices.
void parallel_for(int n, const std::function<void(int, int)>& body);

/// Pairwise (tree) sum with a fixed split pattern. The result depends only on
/// the input order, never on threading.
double pairwise_sum(std::span<const double> values);

}  // namespace muskat
