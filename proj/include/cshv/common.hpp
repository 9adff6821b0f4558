// Shared basics: complex alias, error hierarchy, deterministic reductions,
// and the parallel/serial execution toggle used by all grid kernels.
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cshv {

using cx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------------------
// Error hierarchy. Every failure mode raised by the library derives from
// Error so callers can catch one type; the concrete class names the cause.
// ---------------------------------------------------------------------------
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define CSHV_DEFINE_ERROR(NAME)                                    \
  struct NAME : Error {                                            \
    explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {} \
  }

CSHV_DEFINE_ERROR(NonZeroMean);
CSHV_DEFINE_ERROR(GridTooSmall);
CSHV_DEFINE_ERROR(PoleOnPath);
CSHV_DEFINE_ERROR(ToleranceNotMet);
CSHV_DEFINE_ERROR(AtPole);
CSHV_DEFINE_ERROR(AtSingularity);
CSHV_DEFINE_ERROR(NotARectangle);
CSHV_DEFINE_ERROR(BalanceViolated);
CSHV_DEFINE_ERROR(ResidueNotCancelled);
CSHV_DEFINE_ERROR(DiscriminantNegative);
CSHV_DEFINE_ERROR(RhoTooLarge);
CSHV_DEFINE_ERROR(CurveTraceFailed);
CSHV_DEFINE_ERROR(SeriesDegreeInsufficient);
CSHV_DEFINE_ERROR(Divergent);
CSHV_DEFINE_ERROR(SeriesDiverged);
CSHV_DEFINE_ERROR(NoZeroFound);
CSHV_DEFINE_ERROR(DegenerateJacobian);
CSHV_DEFINE_ERROR(NewtonDiverged);
CSHV_DEFINE_ERROR(ConfigInvalid);

#undef CSHV_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Execution policy. Grid kernels run OpenMP-parallel by default; setting
// use_parallel(false) (or env CSHV_SERIAL=1 at startup) selects the serial
// reference path. Reductions are organized in 64 fixed chunks summed in fixed
// order, so parallel and serial results are bitwise identical.
// ---------------------------------------------------------------------------
bool use_parallel() noexcept;
void set_use_parallel(bool on) noexcept;

inline constexpr int kReductionChunks = 64;

// Deterministic sum of f(i) for i in [0,n). Chunked reduction; see above.
double det_sum(std::int64_t n, const std::function<double(std::int64_t)>& f);
cx det_sum_cx(std::int64_t n, const std::function<cx(std::int64_t)>& f);

// Deterministic element-wise loop (no reduction): body(i) for i in [0,n).
void par_for(std::int64_t n, const std::function<void(std::int64_t)>& body);

}  // namespace cshv
