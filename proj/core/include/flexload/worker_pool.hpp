// Copyright 2026 The flexload Authors
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

#ifndef FLEXLOAD_WORKER_POOL_HPP_
#define FLEXLOAD_WORKER_POOL_HPP_

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace flexload {

// Fixed set of threads running index-parallel loops. The calling thread
// takes part, so a pool of size 1 runs everything inline. Each index is
// visited exactly once; results written per index are independent of the
// worker count.
class WorkerPool {
 public:
  explicit WorkerPool(unsigned workers = default_workers());
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  unsigned size() const { return static_cast<unsigned>(threads_.size()) + 1; }

  // Runs body(i) for i in [0, n) and returns when all are done. The first
  // exception thrown by any body is rethrown here.
  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

  static unsigned default_workers();

 private:
  void worker_loop();
  void drain();

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* body_ = nullptr;
  std::size_t count_ = 0;
  std::atomic<std::size_t> next_{0};
  std::size_t active_ = 0;
  std::uint64_t generation_ = 0;
  bool stopping_ = false;
  std::exception_ptr error_;
};

// Runs body over [0, n) on `pool`, or inline when pool is null.
void parallel_for(WorkerPool* pool, std::size_t n,
                  const std::function<void(std::size_t)>& body);

}  // namespace flexload

#endif  // FLEXLOAD_WORKER_POOL_HPP_
