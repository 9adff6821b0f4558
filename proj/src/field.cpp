#include "cshv/field.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace cshv {

namespace {

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

// 2-D complex FFT, sign = FFTW_FORWARD or FFTW_BACKWARD, in place on buf.
// Layout: buf[j*M + i] with j the slow index, i the fast one.
void fft2(std::vector<cx>& buf, int M, int sign) {
  fftw_complex* data = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft_2d(M, M, data, data, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
}

inline int signed_freq(int k, int M) { return k <= M / 2 ? k : k - M; }

}  // namespace

PeriodicField PeriodicField::sample(const Torus& T, int M,
                                    const std::function<double(cx)>& f) {
  PeriodicField out(T, M);
  par_for(M, [&](std::int64_t j) {
    for (int i = 0; i < M; ++i) out.at(i, int(j)) = f(out.z_at(i, int(j)));
  });
  return out;
}

double PeriodicField::mean() const {
  const std::int64_t n = std::int64_t(M) * M;
  return det_sum(n, [this](std::int64_t k) { return v[std::size_t(k)]; }) / double(n);
}

PeriodicField& PeriodicField::operator+=(const PeriodicField& o) {
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += o.v[k];
  return *this;
}
PeriodicField& PeriodicField::operator-=(const PeriodicField& o) {
  for (std::size_t k = 0; k < v.size(); ++k) v[k] -= o.v[k];
  return *this;
}
PeriodicField& PeriodicField::operator*=(double c) {
  for (double& x : v) x *= c;
  return *this;
}
PeriodicField PeriodicField::map(const std::function<double(double)>& f) const {
  PeriodicField out(torus, M);
  par_for(std::int64_t(M) * M,
          [&](std::int64_t k) { out.v[std::size_t(k)] = f(v[std::size_t(k)]); });
  return out;
}

PeriodicField PeriodicField::laplacian() const {
  std::vector<cx> buf(v.begin(), v.end());
  fft2(buf, M, FFTW_FORWARD);
  const double A = torus.area();
  const double c = 4.0 * kPi * kPi / (A * A);
  for (int l = 0; l < M; ++l)
    for (int k = 0; k < M; ++k) {
      const double kk = signed_freq(k, M), ll = signed_freq(l, M);
      const double sym = c * std::norm(kk * torus.w2 - ll * torus.w1);
      buf[std::size_t(l) * M + k] *= -sym;
    }
  fft2(buf, M, FFTW_BACKWARD);
  PeriodicField out(torus, M);
  const double inv = 1.0 / (double(M) * M);
  for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] = buf[k].real() * inv;
  return out;
}

PeriodicField solve_poisson(const PeriodicField& f, double mean_tol) {
  const int M = f.M;
  const double m = f.mean();
  double scale = 0.0;
  for (double x : f.v) scale = std::max(scale, std::abs(x));
  if (std::abs(m) > mean_tol * std::max(1.0, scale))
    throw NonZeroMean("mean " + std::to_string(m) + " exceeds tolerance");

  std::vector<cx> buf(f.v.begin(), f.v.end());
  fft2(buf, M, FFTW_FORWARD);
  const double A = f.torus.area();
  const double c = 4.0 * kPi * kPi / (A * A);
  for (int l = 0; l < M; ++l)
    for (int k = 0; k < M; ++k) {
      if (k == 0 && l == 0) {
        buf[0] = 0.0;
        continue;
      }
      const double kk = signed_freq(k, M), ll = signed_freq(l, M);
      const double sym = c * std::norm(kk * f.torus.w2 - ll * f.torus.w1);
      buf[std::size_t(l) * M + k] /= -sym;
    }
  fft2(buf, M, FFTW_BACKWARD);
  PeriodicField out(f.torus, M);
  const double inv = 1.0 / (double(M) * M);
  for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] = buf[k].real() * inv;
  return out;
}

PeriodicField helmholtz_inverse(const PeriodicField& f, double kappa) {
  if (!(kappa > 0.0))
    throw ConfigInvalid("helmholtz_inverse requires a positive shift");
  const int M = f.M;
  std::vector<cx> buf(f.v.begin(), f.v.end());
  fft2(buf, M, FFTW_FORWARD);
  const double A = f.torus.area();
  const double c = 4.0 * kPi * kPi / (A * A);
  for (int l = 0; l < M; ++l)
    for (int k = 0; k < M; ++k) {
      const double kk = signed_freq(k, M), ll = signed_freq(l, M);
      const double sym = c * std::norm(kk * f.torus.w2 - ll * f.torus.w1);
      buf[std::size_t(l) * M + k] /= -(sym + kappa);
    }
  fft2(buf, M, FFTW_BACKWARD);
  PeriodicField out(f.torus, M);
  const double inv = 1.0 / (double(M) * M);
  for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] = buf[k].real() * inv;
  return out;
}

PeriodicField PeriodicField::upsample(int M2) const {
  if (M2 < M) throw GridTooSmall("upsample target must be >= source grid");
  std::vector<cx> buf(v.begin(), v.end());
  fft2(buf, M, FFTW_FORWARD);
  std::vector<cx> big(std::size_t(M2) * M2, cx(0));
  const double scale = 1.0 / (double(M) * M);
  // Copy modes by signed frequency. For even M the +M/2 frequency holds the
  // combined  +/-M/2 content; splitting it evenly keeps the interpolant real.
  for (int l = 0; l < M; ++l)
    for (int k = 0; k < M; ++k) {
      const int kk = signed_freq(k, M), ll = signed_freq(l, M);
      cx val = buf[std::size_t(l) * M + k] * scale;
      std::vector<std::pair<int, int>> targets;
      const bool kedge = (k == M / 2), ledge = (l == M / 2);
      const std::vector<int> ks = kedge ? std::vector<int>{M / 2, -M / 2}
                                        : std::vector<int>{kk};
      const std::vector<int> ls = ledge ? std::vector<int>{M / 2, -M / 2}
                                        : std::vector<int>{ll};
      const double w = 1.0 / double(ks.size() * ls.size());
      for (int a : ks)
        for (int b : ls) {
          const int ki = a >= 0 ? a : a + M2;
          const int li = b >= 0 ? b : b + M2;
          // Sign fix-up: the (i - M/2) grid offset contributes (-1)^{k+l} with
          // k,l the *index*; index parity equals signed-frequency parity on
          // both grids except for the split -M/2 copy when M/2 is odd.
          double sgn = 1.0;
          if ((((a - kk) % 2) + 2) % 2 == 1) sgn = -sgn;
          if ((((b - ll) % 2) + 2) % 2 == 1) sgn = -sgn;
          big[std::size_t(li) * M2 + ki] += val * w * sgn;
        }
    }
  fft2(big, M2, FFTW_BACKWARD);
  PeriodicField out(torus, M2);
  for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] = big[k].real();
  return out;
}

double PeriodicField::eval_interpolant(cx z) const {
  auto [t, s] = torus.to_lattice(z);
  std::vector<cx> buf(v.begin(), v.end());
  fft2(buf, M, FFTW_FORWARD);
  const double scale = 1.0 / (double(M) * M);
  cx acc = 0.0;
  for (int l = 0; l < M; ++l)
    for (int k = 0; k < M; ++k) {
      const double kk = signed_freq(k, M), ll = signed_freq(l, M);
      // Edge modes (|freq| = M/2) carry combined +/- content on the sample
      // grid; the real-symmetric interpolant uses the cosine in that slot.
      const cx fk = (k == M / 2) ? cx(std::cos(2.0 * kPi * kk * (t + 0.5)), 0.0)
                                 : std::exp(cx(0, 2.0 * kPi * kk * (t + 0.5)));
      const cx fl = (l == M / 2) ? cx(std::cos(2.0 * kPi * ll * (s + 0.5)), 0.0)
                                 : std::exp(cx(0, 2.0 * kPi * ll * (s + 0.5)));
      acc += buf[std::size_t(l) * M + k] * scale * fk * fl;
    }
  return acc.real();
}

}  // namespace cshv
