#include "cshv/common.hpp"

#include <atomic>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cshv {

namespace {
std::atomic<bool> g_parallel{[] {
  const char* env = std::getenv("CSHV_SERIAL");
  return !(env && env[0] == '1');
}()};
}  // namespace

bool use_parallel() noexcept { return g_parallel.load(std::memory_order_relaxed); }
void set_use_parallel(bool on) noexcept { g_parallel.store(on, std::memory_order_relaxed); }

// Chunked reduction: the partition into kReductionChunks blocks and the order
// of the final accumulation are fixed, so the result does not depend on how
// many threads execute the chunks.
double det_sum(std::int64_t n, const std::function<double(std::int64_t)>& f) {
  if (n <= 0) return 0.0;
  double partial[kReductionChunks] = {};
  const std::int64_t nc = std::min<std::int64_t>(kReductionChunks, n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (use_parallel())
#endif
  for (std::int64_t c = 0; c < nc; ++c) {
    const std::int64_t lo = n * c / nc, hi = n * (c + 1) / nc;
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += f(i);
    partial[c] = s;
  }
  double total = 0.0;
  for (std::int64_t c = 0; c < nc; ++c) total += partial[c];
  return total;
}

cx det_sum_cx(std::int64_t n, const std::function<cx(std::int64_t)>& f) {
  if (n <= 0) return cx(0.0);
  cx partial[kReductionChunks] = {};
  const std::int64_t nc = std::min<std::int64_t>(kReductionChunks, n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (use_parallel())
#endif
  for (std::int64_t c = 0; c < nc; ++c) {
    const std::int64_t lo = n * c / nc, hi = n * (c + 1) / nc;
    cx s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += f(i);
    partial[c] = s;
  }
  cx total = 0.0;
  for (std::int64_t c = 0; c < nc; ++c) total += partial[c];
  return total;
}

void par_for(std::int64_t n, const std::function<void(std::int64_t)>& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (use_parallel())
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace cshv
