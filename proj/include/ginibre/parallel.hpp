#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

namespace ginibre {

/// Worker cap used by every parallel loop in the library. Defaults to the
/// GINIBRE_THREADS environment variable, else the hardware concurrency.
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [0, n). Each index is processed exactly once and
/// callers write results into per-index slots, so outputs never depend on the
/// number of workers. Exceptions from any worker are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Like parallel_for but hands out contiguous [begin, end) chunks.
void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t)>& body);

/// Neumaier-compensated accumulator; reductions in the library add terms in
/// index order through this type.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace ginibre
