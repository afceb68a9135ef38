#include "crosslab/util.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>
#include <vector>

namespace crosslab {

double halton(uint64_t index, uint32_t base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

void parallel_chunks(int64_t n, int64_t chunk_size, int jobs,
                     const std::function<void(int64_t, int64_t)>& fn) {
  if (n <= 0) return;
  if (chunk_size < 1) chunk_size = 1;
  const int64_t n_chunks = (n + chunk_size - 1) / chunk_size;
  int workers = jobs;
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (workers <= 0) workers = hw > 0 ? hw : 1;
  workers = static_cast<int>(std::min<int64_t>(workers, n_chunks));
  if (workers <= 1) {
    for (int64_t c = 0; c < n_chunks; ++c)
      fn(c * chunk_size, std::min(n, (c + 1) * chunk_size));
    return;
  }
  std::atomic<int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const int64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      fn(c * chunk_size, std::min(n, (c + 1) * chunk_size));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace crosslab
