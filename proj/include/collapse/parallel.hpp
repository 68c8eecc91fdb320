#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace collapse {

enum class Execution { serial, parallel };

// Evaluates f(k) for k in [0, n). The serial path is the reference
// implementation; the OpenMP path must produce identical output because every
// f(k) is a pure function of k. If any evaluation throws, the exception of the
// lowest failing index is rethrown on both paths.
template <class T, class F>
std::vector<T> evaluate_indexed(std::size_t n, F&& f, Execution exec = Execution::parallel) {
  std::vector<T> out(n);
  if (exec == Execution::serial || n < 2) {
    for (std::size_t k = 0; k < n; ++k) out[k] = f(k);
    return out;
  }

  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long k = 0; k < count; ++k) {
    try {
      out[static_cast<std::size_t>(k)] = f(static_cast<std::size_t>(k));
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline int available_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace collapse
