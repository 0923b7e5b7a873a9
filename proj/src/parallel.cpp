#include "hrqhd/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hrqhd {

namespace {
int env_workers() {
  const char *s = std::getenv("HRQHD_THREADS");
  if (!s)
    return 1;
  const int n = std::atoi(s);
  return n > 0 ? n : 1;
}
std::atomic<int> g_workers{env_workers()};
} // namespace

int worker_count() { return g_workers.load(); }

void set_worker_count(int n) { g_workers.store(n > 0 ? n : env_workers()); }

void parallel_for(int n, const std::function<void(int)> &f) {
  const int w = std::min(worker_count(), n);
  if (w <= 1) {
    for (int i = 0; i < n; ++i)
      f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < w; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(err_mutex);
          if (!err)
            err = std::current_exception();
        }
      }
    });
  for (auto &th : pool)
    th.join();
  if (err)
    std::rethrow_exception(err);
}

} // namespace hrqhd
