#include "cshv/green.hpp"

#include <cmath>

namespace cshv {

Green::Green(const Torus& torus) : T(torus), th(torus) {
  area = T.area();
  im_tau = std::imag(T.tau());
  log_fac = std::log(std::abs(kPi * th.theta1p0() / T.w1));
  H0 = -log_fac / (2.0 * kPi) - im_tau / 24.0;
}

double Green::G(cx z) const {
  const cx zw = T.wrap(z);
  const cx v = th.v_of(zw);
  const double im = std::imag(zw / T.w1);
  return -std::log(std::abs(th.theta1(v))) / (2.0 * kPi) +
         im * im / (2.0 * im_tau) - im_tau / 24.0;
}

double Green::H(cx z) const {
  const cx zw = T.wrap(z);
  if (std::abs(zw) < 1e-14 * std::sqrt(area)) return H0;
  return G(zw) + std::log(std::abs(zw)) / (2.0 * kPi);
}

cx Green::G_z(cx z) const {
  const cx zw = T.wrap(z);
  const cx v = th.v_of(zw);
  const cx t = th.theta1(v);
  if (std::abs(t) < 1e-280) throw AtSingularity("G_z at a lattice point");
  const cx logd = (kPi / T.w1) * th.theta1_d1(v) / t;
  const double im = std::imag(zw / T.w1);
  return -logd / (4.0 * kPi) + im / (cx(0, 2.0) * T.w1 * im_tau);
}

cx Green::G_zz(cx z) const {
  const cx zw = T.wrap(z);
  const cx v = th.v_of(zw);
  const cx c = kPi / T.w1;
  return -c * c * th.logtheta1_d2(v) / (4.0 * kPi) -
         1.0 / (4.0 * T.w1 * T.w1 * im_tau);
}

cx Green::hstar_value(cx z) const {
  if (std::abs(z) < 1e-300) return cx(H0, 0.0);
  const cx v = th.v_of(z);
  const cx bracket = th.theta1(v) * T.w1 / (kPi * th.theta1p0() * z);
  return -std::log(bracket) / (2.0 * kPi) -
         z * z / (4.0 * T.w1 * T.w1 * im_tau) +
         cx(-im_tau / 24.0 - log_fac / (2.0 * kPi), 0.0);
}

cx Green::hstar_prime(cx z) const {
  if (std::abs(z) < 1e-300) return cx(0.0);
  const cx v = th.v_of(z);
  const cx t = th.theta1(v);
  if (std::abs(t) < 1e-280) throw AtSingularity("(H*)' at a nonzero lattice point");
  const cx ratio = (kPi / T.w1) * th.theta1_d1(v) / t;
  return -(ratio - 1.0 / z) / (2.0 * kPi) - z / (2.0 * T.w1 * T.w1 * im_tau);
}

LocalSeries Green::hstar_series0(int deg) const {
  // Smallest nonzero lattice distance bounds the analyticity of the bracket.
  double dmin = std::abs(T.w1);
  for (int m = -1; m <= 1; ++m)
    for (int n = -1; n <= 1; ++n)
      if (m || n) dmin = std::min(dmin, std::abs(double(m) * T.w1 + double(n) * T.w2));
  const double r = 0.3 * dmin;
  const LocalSeries F = LocalSeries::fit(
      [this](cx z) { return th.theta1(th.v_of(z)) * T.w1 / (kPi * th.theta1p0() * z); },
      cx(0), r, 0, deg);
  LocalSeries out = (-1.0 / (2.0 * kPi)) * log_series(F);
  // a0 of log(F) is log(1) = 0; add the quadratic term and the real constant.
  if (deg >= 2) out.a[2] += -1.0 / (4.0 * T.w1 * T.w1 * im_tau);
  out.a[0] = cx(H0, 0.0);
  out.radius = r;
  return out;
}

LocalSeries Green::hstar_series(cx base, int deg, double radius) const {
  if (std::abs(base) < 1e-12 * std::sqrt(area)) return hstar_series0(deg);
  double r = radius;
  if (r <= 0.0) {
    // Stay away from the poles of (H*)' (nonzero lattice points) and from 0
    // only as a conditioning precaution.
    double dmin = std::abs(base);  // allow approaching 0 mildly; it's regular
    for (int m = -2; m <= 2; ++m)
      for (int n = -2; n <= 2; ++n)
        if (m || n)
          dmin = std::min(dmin, std::abs(base - (double(m) * T.w1 + double(n) * T.w2)));
    r = 0.45 * dmin;
  }
  const LocalSeries dP =
      LocalSeries::fit([this](cx z) { return hstar_prime(z); }, base, r, 0, deg - 1);
  LocalSeries out = dP.antiderivative(1e-7);
  out = out.truncated(0, deg);
  out.a[0] = cx(H(base) - std::norm(base) / (4.0 * area), 0.0);
  out.radius = r;
  return out;
}

namespace {
// For a rectangle with periods (a, i b), b >= a, the derivative series use
// lambda_k = 1/(e^{2 pi k b / a} - 1).
struct LambdaSums {
  double s2 = 0.0;  // sum lam(lam+1)
  double s4 = 0.0;  // sum lam(lam+1)(6 lam^2 + 6 lam + 1)
  double s6 = 0.0;  // sum lam(lam+1)(120 lam^4 + 240 lam^3 + 150 lam^2 + 30 lam + 1)
};
LambdaSums lambda_sums(double a, double b, int K = 64) {
  LambdaSums out;
  for (int k = 1; k <= K; ++k) {
    const double e = std::expm1(2.0 * kPi * k * b / a);
    const double lam = 1.0 / e;
    const double l2 = lam * (lam + 1.0);
    out.s2 += l2;
    out.s4 += l2 * (6.0 * lam * lam + 6.0 * lam + 1.0);
    out.s6 += l2 * (((120.0 * lam + 240.0) * lam + 150.0) * lam * lam +
                    30.0 * lam + 1.0);
    if (lam < 1e-18) break;
  }
  return out;
}
}  // namespace

double Green::hstar_d2_0() const {
  if (!T.is_rectangle()) throw NotARectangle("derivative series need a rectangle torus");
  double a = std::real(T.w1), b = std::imag(T.w2);
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;  // z -> i z swaps the rectangle and flips d^2 by i^2
  }
  const LambdaSums s = lambda_sums(a, b);
  return sign * (kPi / (6.0 * a * a) - 1.0 / (2.0 * a * b) -
                 4.0 * kPi / (a * a) * s.s2);
}

double Green::hstar_d4_0() const {
  if (!T.is_rectangle()) throw NotARectangle("derivative series need a rectangle torus");
  double a = std::real(T.w1), b = std::imag(T.w2);
  if (b < a) std::swap(a, b);  // i^4 = 1
  const LambdaSums s = lambda_sums(a, b);
  const double p3 = kPi * kPi * kPi;
  return p3 / (15.0 * std::pow(a, 4)) + 16.0 * p3 / std::pow(a, 4) * s.s4;
}

double Green::hstar_d6_0() const {
  if (!T.is_rectangle()) throw NotARectangle("derivative series need a rectangle torus");
  double a = std::real(T.w1), b = std::imag(T.w2);
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;  // i^6 = -1
  }
  const LambdaSums s = lambda_sums(a, b);
  const double p5 = std::pow(kPi, 5);
  return sign * (8.0 * p5 / (63.0 * std::pow(a, 6)) -
                 64.0 * p5 / std::pow(a, 6) * s.s6);
}

double Green::G_product(cx z) const {
  if (!T.is_rectangle()) throw NotARectangle("product formula needs a rectangle torus");
  const double a = std::real(T.w1), b = std::imag(T.w2);
  const cx zw = T.wrap(z);
  const double y = std::imag(zw);
  if (std::abs(zw) < 1e-300) return std::numeric_limits<double>::infinity();
  auto e = [](cx u) { return std::exp(cx(0, 2.0 * kPi) * u); };
  double logsum = std::log(std::abs(1.0 - e(zw / a)));
  for (int k = 1; k <= 200; ++k) {
    const double t1 = std::log(std::abs(1.0 - e((cx(0, k * b) + zw) / a)));
    const double t2 = std::log(std::abs(1.0 - e((cx(0, k * b) - zw) / a)));
    logsum += t1 + t2;
    if (std::abs(t1) + std::abs(t2) < 1e-18) break;
  }
  return y * y / (2.0 * a * b) - y / (2.0 * a) + b / (12.0 * a) -
         logsum / (2.0 * kPi);
}

PeriodicField green_spectral_field(const Torus& T, int M, cx p, double w) {
  PeriodicField rho = PeriodicField::sample(T, M, [&](cx z) {
    double s = 0.0;
    for (int m = -2; m <= 2; ++m)
      for (int n = -2; n <= 2; ++n) {
        const cx d = z - p + double(m) * T.w1 + double(n) * T.w2;
        s += std::exp(-std::norm(d) / (2.0 * w * w));
      }
    return s / (2.0 * kPi * w * w);
  });
  const double A = T.area();
  PeriodicField f = rho.map([&](double r) { return 1.0 / A - r; });
  PeriodicField u = solve_poisson(f, 1e-6);
  return u.map([&](double x) { return x - w * w / (2.0 * A); });
}

}  // namespace cshv
