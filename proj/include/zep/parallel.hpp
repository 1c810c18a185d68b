#pragma once

#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace zep {

inline void set_num_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Exceptions must not leave an OpenMP region. Each iteration runs through
// capture(); the error of the lowest failing index is rethrown afterwards, so
// the reported error does not depend on scheduling.
class LoopErrors {
 public:
  template <class F>
  void capture(std::ptrdiff_t index, F&& body) noexcept {
    try {
      body();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu_);
      if (index < index_) {
        index_ = index;
        first_ = std::current_exception();
      }
    }
  }
  void rethrow() const {
    if (first_) std::rethrow_exception(first_);
  }

 private:
  std::mutex mu_;
  std::ptrdiff_t index_ = std::numeric_limits<std::ptrdiff_t>::max();
  std::exception_ptr first_;
};

}  // namespace zep
