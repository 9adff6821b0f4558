#include "cshv/elliptic.hpp"

#include <cmath>

namespace cshv {

namespace {
constexpr int kMaxTerms = 64;

// Sum 2 * sum_{n>=0} (-1)^n q^{(n+1/2)^2} * f((2n+1) v) with early stopping.
template <typename F>
cx theta_odd_sum(cx tauv, cx v, F f) {
  cx acc = 0.0;
  double tail_mag = 0.0;
  for (int n = 0; n < kMaxTerms; ++n) {
    const double m = (n + 0.5) * (n + 0.5);
    const cx qq = std::exp(cx(0, kPi) * tauv * m);
    const cx term = (n % 2 == 0 ? 1.0 : -1.0) * qq * f(double(2 * n + 1), v);
    acc += term;
    const double tm = std::abs(term);
    if (n > 2 && tm < 1e-18 * std::max(1.0, std::abs(acc)) && tail_mag < 1e-18 * std::max(1.0, std::abs(acc)))
      break;
    tail_mag = tm;
  }
  return 2.0 * acc;
}
}  // namespace

cx Theta::theta1(cx v) const {
  return theta_odd_sum(tau, v, [](double m, cx vv) { return std::sin(m * vv); });
}
cx Theta::theta1_d1(cx v) const {
  return theta_odd_sum(tau, v, [](double m, cx vv) { return m * std::cos(m * vv); });
}
cx Theta::theta1_d2(cx v) const {
  return theta_odd_sum(tau, v, [](double m, cx vv) { return -m * m * std::sin(m * vv); });
}
cx Theta::theta1_d3(cx v) const {
  return theta_odd_sum(tau, v, [](double m, cx vv) { return -m * m * m * std::cos(m * vv); });
}
cx Theta::theta2(cx v) const {
  cx acc = 0.0;
  for (int n = 0; n < kMaxTerms; ++n) {
    const double m = (n + 0.5) * (n + 0.5);
    const cx term = std::exp(cx(0, kPi) * tau * m) * std::cos(double(2 * n + 1) * v);
    acc += term;
    if (n > 2 && std::abs(term) < 1e-18 * std::max(1.0, std::abs(acc))) break;
  }
  return 2.0 * acc;
}
cx Theta::theta3_0() const {
  cx acc = 1.0;
  for (int n = 1; n < kMaxTerms; ++n) {
    const cx term = 2.0 * std::exp(cx(0, kPi) * tau * (double(n) * n));
    acc += term;
    if (std::abs(term) < 1e-18 * std::abs(acc)) break;
  }
  return acc;
}
cx Theta::theta4_0() const {
  cx acc = 1.0;
  for (int n = 1; n < kMaxTerms; ++n) {
    const cx term = 2.0 * (n % 2 == 0 ? 1.0 : -1.0) * std::exp(cx(0, kPi) * tau * (double(n) * n));
    acc += term;
    if (std::abs(term) < 1e-18 * std::abs(acc)) break;
  }
  return acc;
}

cx Theta::logtheta1_d2(cx v) const {
  const cx t = theta1(v);
  if (std::abs(t) < 1e-280) throw AtPole("log theta1 derivative at a lattice point");
  const cx t1 = theta1_d1(v), t2 = theta1_d2(v);
  const cx r1 = t1 / t;
  return t2 / t - r1 * r1;
}
cx Theta::logtheta1_d3(cx v) const {
  const cx t = theta1(v);
  if (std::abs(t) < 1e-280) throw AtPole("log theta1 derivative at a lattice point");
  const cx t1 = theta1_d1(v), t2 = theta1_d2(v), t3 = theta1_d3(v);
  const cx r1 = t1 / t;
  return t3 / t - 3.0 * t2 * t1 / (t * t) + 2.0 * r1 * r1 * r1;
}

cx eisenstein(int k, cx tau) {
  if (k != 4 && k != 6) throw ConfigInvalid("eisenstein implemented for k in {4, 6}");
  cx acc = 1.0;
  const double coef = (k == 4) ? 240.0 : -504.0;
  for (int m = 1; m < 256; ++m) {
    const cx qm = std::exp(cx(0, 2.0 * kPi) * tau * double(m));
    const double mp = (k == 4) ? double(m) * m * m : double(m) * m * m * double(m) * m;
    const cx term = coef * mp * qm / (1.0 - qm);
    acc += term;
    if (std::abs(term) < 1e-18 * std::abs(acc)) break;
  }
  return acc;
}

EllipticData::EllipticData(const Torus& torus) : T(torus), th(torus) {
  const cx w1 = T.w1, tau = T.tau();
  G4 = std::pow(kPi, 4) / 45.0 * eisenstein(4, tau) / std::pow(w1, 4);
  G6 = 2.0 * std::pow(kPi, 6) / 945.0 * eisenstein(6, tau) / std::pow(w1, 6);
  g2 = 60.0 * G4;
  g3 = 140.0 * G6;
  e1 = wp(0.5 * T.w1);
  e2 = wp(0.5 * T.w2);
  e3 = wp(0.5 * (T.w1 + T.w2));
}

cx EllipticData::wp(cx z) const {
  const cx v = th.v_of(z);
  const cx c = kPi / T.w1;
  return -c * c * (th.logtheta1_d2(v) - th.theta1ppp0() / (3.0 * th.theta1p0()));
}

cx EllipticData::wp_prime(cx z) const {
  const cx v = th.v_of(z);
  const cx c = kPi / T.w1;
  return -c * c * c * th.logtheta1_d3(v);
}

cx EllipticData::wzeta(cx z) const {
  const cx v = th.v_of(z);
  const cx t = th.theta1(v);
  if (std::abs(t) < 1e-280) throw AtPole("wzeta at a lattice point");
  const cx c = kPi / T.w1;
  const cx c1 = -c * c * th.theta1ppp0() / (3.0 * th.theta1p0());
  return c * th.theta1_d1(v) / t + c1 * z;
}

cx lattice_sum(const Torus& T, int k, int R) {
  // Group (m,n), (-m,-n) and (m,-n), (-m,n): for even k the quadrants add,
  // and angular cancellation makes the grouped tail fall off fast.
  const std::int64_t total = std::int64_t(R) * (R + 1);
  // Enumerate pairs (m, n) with m in [1, R], n in [0, R] -> index i.
  cx sum_axes = 0.0;
  for (int n = 1; n <= R; ++n) {
    sum_axes += 2.0 / std::pow(double(n) * T.w2, k);  // (0, +/-n)
  }
  const cx quadrants = det_sum_cx(total, [&](std::int64_t i) {
    const int m = int(i / (R + 1)) + 1;
    const int n = int(i % (R + 1));
    const cx a = double(m) * T.w1 + double(n) * T.w2;
    cx s = 2.0 / std::pow(a, k);  // (m, n) and (-m, -n)
    if (n > 0) {
      const cx b = double(m) * T.w1 - double(n) * T.w2;
      s += 2.0 / std::pow(b, k);  // (m, -n) and (-m, n)
    }
    return s;
  });
  return sum_axes + quadrants;
}

}  // namespace cshv
