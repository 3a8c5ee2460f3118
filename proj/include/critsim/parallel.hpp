// Copyright 2026 The critsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CRITSIM__PARALLEL_HPP_
#define CRITSIM__PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace critsim
{

/// How many workers a data-parallel stage may use.
class WorkerPolicy
{
public:
  enum class Kind { sequential, fixed, all_cores };

  static WorkerPolicy sequential() { return WorkerPolicy(Kind::sequential, 1); }
  static WorkerPolicy fixed(unsigned count) { return WorkerPolicy(Kind::fixed, std::max(1u, count)); }
  static WorkerPolicy all_cores() { return WorkerPolicy(Kind::all_cores, 0); }

  /// Parses "auto", "seq" or a positive integer.
  static WorkerPolicy parse(const std::string & text)
  {
    if (text == "auto" || text == "all") {
      return all_cores();
    }
    if (text == "seq" || text == "sequential") {
      return sequential();
    }
    const unsigned long count = std::stoul(text);
    return count <= 1 ? sequential() : fixed(static_cast<unsigned>(count));
  }

  Kind kind() const noexcept { return kind_; }

  /// Number of worker threads this policy resolves to on the current machine.
  unsigned resolve() const noexcept
  {
    switch (kind_) {
      case Kind::sequential:
        return 1;
      case Kind::fixed:
        return count_;
      case Kind::all_cores:
        return std::max(1u, std::thread::hardware_concurrency());
    }
    return 1;
  }

  bool operator==(const WorkerPolicy &) const = default;

private:
  WorkerPolicy(Kind kind, unsigned count) : kind_(kind), count_(count) {}

  Kind kind_;
  unsigned count_;
};

/// Calls `fn(i)` for every i in [0, count). Work is split into contiguous
/// blocks, one per worker; every index is visited exactly once. The first
/// exception (lowest block) is rethrown after all workers joined.
template <class Fn>
void parallel_for(std::size_t count, const WorkerPolicy & policy, Fn && fn)
{
  if (count == 0) {
    return;
  }
  const std::size_t workers = std::min<std::size_t>(policy.resolve(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }

  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    const std::size_t block = count / workers;
    const std::size_t extra = count % workers;
    std::size_t begin = 0;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t end = begin + block + (w < extra ? 1 : 0);
      threads.emplace_back([&fn, &errors, w, begin, end] {
        try {
          for (std::size_t i = begin; i < end; ++i) {
            fn(i);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
      begin = end;
    }
  }
  for (const auto & error : errors) {
    if (error) {
      std::rethrow_exception(error);
    }
  }
}

}  // namespace critsim

#endif  // CRITSIM__PARALLEL_HPP_
