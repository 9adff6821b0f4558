// Compares the parallel kernels against the serial reference implementation:
// same code paths with threading switched off must produce bit-identical
// results (the reductions are chunked deterministically), so the comparison
// is memcmp, not a tolerance.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <vector>

#include "cshv/common.hpp"
#include "cshv/field.hpp"

using namespace cshv;

namespace {

double now_s() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch())
      .count();
}

struct BenchResult {
  double serial_s = 0.0;
  double parallel_s = 0.0;
  bool identical = false;
};

BenchResult bench(const std::function<std::vector<double>()>& kernel,
                  int reps) {
  BenchResult r;
  std::vector<double> a, b;
  set_use_parallel(false);
  a = kernel();  // warm-up + reference
  double t0 = now_s();
  for (int i = 0; i < reps; ++i) a = kernel();
  r.serial_s = (now_s() - t0) / reps;

  set_use_parallel(true);
  b = kernel();
  t0 = now_s();
  for (int i = 0; i < reps; ++i) b = kernel();
  r.parallel_s = (now_s() - t0) / reps;

  r.identical = a.size() == b.size() &&
                std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
  return r;
}

void report(const char* name, const BenchResult& r) {
  std::printf("%-22s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx   %s\n",
              name, 1e3 * r.serial_s, 1e3 * r.parallel_s,
              r.parallel_s > 0 ? r.serial_s / r.parallel_s : 0.0,
              r.identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
  const int M = 512;
  Torus T{cx(1.0, 0.0), cx(0.11, 0.97)};

  PeriodicField f(T, M);
  for (int j = 0; j < M; ++j)
    for (int i = 0; i < M; ++i) {
      const double t = (i - M / 2) / double(M), s = (j - M / 2) / double(M);
      f.v[std::size_t(j) * M + i] =
          std::sin(2 * kPi * t) * std::cos(4 * kPi * s) +
          0.3 * std::cos(6 * kPi * (t + s));
    }

  int failures = 0;
  auto run = [&](const char* name, std::function<std::vector<double>()> k,
                 int reps) {
    BenchResult r = bench(k, reps);
    report(name, r);
    if (!r.identical) ++failures;
  };

  const std::int64_t nn = std::int64_t(M) * M;
  run("exp field", [&] {
    PeriodicField g = f;
    par_for(nn, [&](std::int64_t i) { g.v[std::size_t(i)] = std::exp(2.0 * f.v[std::size_t(i)]); });
    return g.v;
  }, 20);

  run("chunked reduction", [&] {
    const double s1 = det_sum(nn, [&](std::int64_t i) {
      return f.v[std::size_t(i)] * f.v[std::size_t(i)];
    });
    const cx s2 = det_sum_cx(nn, [&](std::int64_t i) {
      return cx(f.v[std::size_t(i)], -f.v[std::size_t(i)]) * f.v[std::size_t(i)];
    });
    return std::vector<double>{s1, s2.real(), s2.imag()};
  }, 20);

  run("spectral laplacian", [&] { return f.laplacian().v; }, 10);

  run("poisson solve", [&] {
    PeriodicField g = f;
    const double mean = g.mean();
    for (double& x : g.v) x -= mean;
    return solve_poisson(g).v;
  }, 10);

  set_use_parallel(true);
  if (failures > 0) {
    std::printf("%d kernel(s) differ between serial and parallel runs\n",
                failures);
    return 1;
  }
  std::printf("all kernels bit-identical between serial and parallel runs\n");
  return 0;
}
