#pragma once

// Index loop run under OpenMP or serially. An exception thrown by any
// iteration is rethrown on the calling thread once the loop has finished.

#include <exception>
#include <mutex>

namespace weil {

template <class F>
void for_each_index(long n, bool parallel, F&& body) {
  if (!parallel) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace weil
