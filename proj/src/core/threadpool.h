#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sanerf {

// Fixed-size pool used by parallel_for. Work is split into per-thread ranges
// with disjoint outputs, so results do not depend on the thread count.
class ThreadPool {
 public:
  explicit ThreadPool(int n_threads);
  ~ThreadPool();

  int size() const { return static_cast<int>(workers_.size()) + 1; }

  // Runs fn(begin, end) over [0, n) split into roughly equal chunks, one per
  // thread (the calling thread takes the first chunk). Blocks until done.
  void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

 private:
  struct Task {
    const std::function<void(std::size_t, std::size_t)>* fn = nullptr;
    std::size_t begin = 0, end = 0;
  };

  void worker_loop(int idx);

  std::vector<std::thread> workers_;
  std::vector<Task> tasks_;
  std::mutex mu_;
  std::condition_variable cv_work_, cv_done_;
  uint64_t epoch_ = 0;
  int pending_ = 0;
  bool stop_ = false;
};

// Global pool configured once per process (CLI --threads / SANERF_THREADS).
void set_num_threads(int n);
int num_threads();
ThreadPool& global_pool();

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace sanerf
