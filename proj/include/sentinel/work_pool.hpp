// Copyright 2026 The Sentinel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdlib>
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace sentinel {

// Fixed-size pool of worker threads executing index-range jobs.
//
// A pool of N workers owns N-1 threads; the thread calling parallel_for is the
// N-th worker and keeps claiming chunks of its own job until none remain, so
// parallel_for may be called from inside a running job without deadlocking.
// parallel_for returns only after every index has been processed (a full
// barrier), and rethrows the first exception raised by the body.
class WorkPool {
 public:
  explicit WorkPool(std::size_t workers = default_workers())
      : workers_(std::max<std::size_t>(1, workers)) {
    threads_.reserve(workers_ - 1);
    for (std::size_t i = 1; i < workers_; ++i) {
      threads_.emplace_back([this] { worker_loop(); });
    }
  }

  WorkPool(const WorkPool&) = delete;
  WorkPool& operator=(const WorkPool&) = delete;

  ~WorkPool() {
    {
      std::lock_guard lock(mutex_);
      stopping_ = true;
    }
    wake_.notify_all();
    for (auto& t : threads_) t.join();
  }

  std::size_t workers() const noexcept { return workers_; }

  /// Number of workers requested by SENTINEL_WORKERS, else the number of
  /// logical cores.
  static std::size_t default_workers() {
    if (const char* env = std::getenv("SENTINEL_WORKERS")) {
      try {
        long v = std::stol(env);
        if (v >= 1) return static_cast<std::size_t>(v);
      } catch (...) {
      }
    }
    return std::max(1u, std::thread::hardware_concurrency());
  }

  /// Calls body(begin, end) over disjoint sub-ranges covering [0, count).
  template <typename Body>
  void parallel_for_range(std::size_t count, Body&& body, std::size_t grain = 0) {
    if (count == 0) return;
    if (grain == 0) grain = std::max<std::size_t>(1, count / (workers_ * 8));
    if (workers_ == 1 || count <= grain) {
      body(std::size_t{0}, count);
      return;
    }
    auto job = std::make_shared<Job>();
    job->count = count;
    job->grain = grain;
    job->chunks = (count + grain - 1) / grain;
    job->body = [&body](std::size_t b, std::size_t e) { body(b, e); };
    {
      std::lock_guard lock(mutex_);
      queue_.push_back(job);
    }
    wake_.notify_all();

    while (run_chunk(*job)) {
    }
    {
      std::lock_guard lock(mutex_);
      auto it = std::find(queue_.begin(), queue_.end(), job);
      if (it != queue_.end()) queue_.erase(it);
    }
    std::unique_lock lock(job->mutex);
    job->done.wait(lock, [&] { return job->finished == job->chunks; });
    if (job->error) std::rethrow_exception(job->error);
  }

  /// Calls body(i) for every i in [0, count).
  template <typename Body>
  void parallel_for(std::size_t count, Body&& body, std::size_t grain = 0) {
    parallel_for_range(
        count,
        [&body](std::size_t b, std::size_t e) {
          for (std::size_t i = b; i < e; ++i) body(i);
        },
        grain);
  }

 private:
  struct Job {
    std::size_t count = 0;
    std::size_t grain = 1;
    std::size_t chunks = 0;
    std::function<void(std::size_t, std::size_t)> body;
    std::atomic<std::size_t> next{0};
    std::mutex mutex;
    std::condition_variable done;
    std::size_t finished = 0;
    std::exception_ptr error;
  };

  // Claims and runs one chunk; false when the job has no unclaimed chunks.
  static bool run_chunk(Job& job) {
    std::size_t chunk = job.next.fetch_add(1, std::memory_order_relaxed);
    if (chunk >= job.chunks) return false;
    std::size_t begin = chunk * job.grain;
    std::size_t end = std::min(job.count, begin + job.grain);
    std::exception_ptr error;
    try {
      job.body(begin, end);
    } catch (...) {
      error = std::current_exception();
    }
    {
      std::lock_guard lock(job.mutex);
      if (error && !job.error) job.error = error;
      ++job.finished;
    }
    job.done.notify_all();
    return true;
  }

  void worker_loop() {
    for (;;) {
      std::shared_ptr<Job> job;
      {
        std::unique_lock lock(mutex_);
        wake_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
        if (stopping_ && queue_.empty()) return;
        job = queue_.back();
      }
      if (!run_chunk(*job)) {
        std::lock_guard lock(mutex_);
        auto it = std::find(queue_.begin(), queue_.end(), job);
        if (it != queue_.end()) queue_.erase(it);
      }
    }
  }

  std::size_t workers_;
  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::deque<std::shared_ptr<Job>> queue_;
  bool stopping_ = false;
};

}  // namespace sentinel
