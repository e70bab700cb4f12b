#include "core/threadpool.h"

#include <atomic>
#include <cstdlib>
#include <memory>

namespace sanerf {

namespace {
// Set while a thread is executing a parallel_for chunk. Nested calls fall
// back to serial execution instead of re-entering the pool's task slots.
thread_local bool tl_in_parallel = false;
}  // namespace

ThreadPool::ThreadPool(int n_threads) {
  const int extra = n_threads > 1 ? n_threads - 1 : 0;
  tasks_.resize(extra);
  workers_.reserve(extra);
  for (int i = 0; i < extra; ++i)
    workers_.emplace_back([this, i] { worker_loop(i); });
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard<std::mutex> lk(mu_);
    stop_ = true;
    ++epoch_;
  }
  cv_work_.notify_all();
  for (auto& w : workers_) w.join();
}

void ThreadPool::worker_loop(int idx) {
  uint64_t seen = 0;
  for (;;) {
    Task task;
    {
      std::unique_lock<std::mutex> lk(mu_);
      cv_work_.wait(lk, [&] { return stop_ || epoch_ != seen; });
      if (stop_) return;
      seen = epoch_;
      task = tasks_[idx];
    }
    if (task.fn && task.begin < task.end) {
      tl_in_parallel = true;
      (*task.fn)(task.begin, task.end);
      tl_in_parallel = false;
    }
    {
      std::lock_guard<std::mutex> lk(mu_);
      if (--pending_ == 0) cv_done_.notify_one();
    }
  }
}

void ThreadPool::parallel_for(std::size_t n,
                              const std::function<void(std::size_t, std::size_t)>& fn) {
  const int nt = size();
  if (tl_in_parallel || nt <= 1 || n <= 1) {
    if (n > 0) fn(0, n);
    return;
  }
  const std::size_t chunk = (n + nt - 1) / nt;
  std::size_t my_end = std::min(chunk, n);
  {
    std::lock_guard<std::mutex> lk(mu_);
    pending_ = 0;
    for (std::size_t i = 1; i < static_cast<std::size_t>(nt); ++i) {
      const std::size_t b = std::min(i * chunk, n);
      const std::size_t e = std::min(b + chunk, n);
      tasks_[i - 1] = {&fn, b, e};
      if (b < e) ++pending_;
    }
    ++epoch_;
  }
  cv_work_.notify_all();
  fn(0, my_end);
  std::unique_lock<std::mutex> lk(mu_);
  cv_done_.wait(lk, [&] { return pending_ == 0; });
}

namespace {
std::atomic<int> g_threads{0};
std::unique_ptr<ThreadPool> g_pool;
std::mutex g_pool_mu;
}  // namespace

void set_num_threads(int n) {
  std::lock_guard<std::mutex> lk(g_pool_mu);
  g_threads = n;
  g_pool.reset();
}

int num_threads() {
  int n = g_threads.load();
  if (n > 0) return n;
  if (const char* env = std::getenv("SANERF_THREADS")) {
    n = std::atoi(env);
    if (n > 0) return n;
  }
  n = static_cast<int>(std::thread::hardware_concurrency());
  return n > 0 ? n : 1;
}

ThreadPool& global_pool() {
  std::lock_guard<std::mutex> lk(g_pool_mu);
  if (!g_pool) g_pool = std::make_unique<ThreadPool>(num_threads());
  return *g_pool;
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  global_pool().parallel_for(n, fn);
}

}  // namespace sanerf
