#include "muskat/parallel.hpp"

#include <atomic>

namespace muskat {

namespace {

std::atomic<int> g_threads{0};

}  // namespace

int max_thread_count() { return std::max(1u, std::thread::hardware_concurrency()); }

void set_thread_count(int count) { g_threads.store(std::clamp(count, 1, 4 * max_thread_count())); }

int thread_count() {
  const int n = g_threads.load();
  return n > 0 ? n : max_thread_count();
}

void parallel_for(int n, const std::function<void(int, int)>& body) {
  if (n <= 0) return;
  const int workers = std::min(thread_count(), n);
  if (workers == 1) {
    body(0, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  auto chunk = [n, workers](int w) { return static_cast<int>(static_cast<long long>(n) * w / workers); };
  for (int w = 1; w < workers; ++w) {
    pool.emplace_back([&body, b = chunk(w), e = chunk(w + 1)] { body(b, e); });
  }
  body(0, chunk(1));
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 16;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace muskat
