#include <algorithm>
#include <cmath>

#include "cshv/ansatz.hpp"
#include "cshv/elliptic.hpp"

namespace cshv {

PeriodicField build_u0(const Green& green, const VortexConfig& cfg, int M) {
  const Torus& T = cfg.torus;
  PeriodicField u(T, M);
  const int n = M * M;
  par_for(n, [&](std::size_t q) {
    const int i = static_cast<int>(q) % M, j = static_cast<int>(q) / M;
    const cx z = u.z_at(i, j);
    double acc = 0.0;
    for (std::size_t k = 0; k < cfg.points.size(); ++k)
      acc += cfg.mult[k] * green.G(z - cfg.points[k]);
    u.v[q] = -4.0 * kPi * acc;
  });
  return u;
}

namespace {

// Exponent Q(z) with H(z) = gauge * prod_{j not conc}(z-p_j)^{n_j} * e^{Q(z)}.
cx h_exponent(const Green& green, const VortexConfig& cfg, cx z) {
  const double A = cfg.torus.area();
  cx q = 0.0;
  cx sum_np = 0.0;      // sum_j n_j p_j
  double sum_np2 = 0.0; // sum_j n_j |p_j|^2
  for (std::size_t j = 0; j < cfg.points.size(); ++j) {
    const double nj = cfg.mult[j];
    q -= 2.0 * kPi * nj * green.hstar_value(z - cfg.points[j]);
    sum_np += nj * cfg.points[j];
    sum_np2 += nj * std::norm(cfg.points[j]);
  }
  for (std::size_t l = 0; l < cfg.xi.size(); ++l) {
    const double w = cfg.n_of_xi(l) + 1.0;
    q += 4.0 * kPi * w * green.hstar_value(z - cfg.xi[l]);
    q += (kPi / A) * w * (cfg.xi[l] - 2.0 * z) * std::conj(cfg.xi[l]);
  }
  q += -(kPi / (2.0 * A)) * sum_np2 + (kPi / A) * z * std::conj(sum_np);
  return q;
}

cx h_raw(const Green& green, const VortexConfig& cfg, cx z) {
  cx pref = 1.0;
  for (std::size_t j = 0; j < cfg.points.size(); ++j) {
    if (cfg.xi_index_of_vortex(j) >= 0) continue;  // concentration pts excluded
    for (int r = 0; r < cfg.mult[j]; ++r) pref *= (z - cfg.points[j]);
  }
  return pref * std::exp(h_exponent(green, cfg, z));
}

}  // namespace

cx HData::P_l(std::size_t l, cx z) const {
  cx p = 1.0;
  for (std::size_t k = 0; k < cfg.xi.size(); ++k) {
    if (k == l) continue;
    const int e = cfg.n_of_xi(k) + 2;
    for (int r = 0; r < e; ++r) p *= (z - cfg.xi[k]);
  }
  return p;
}

cx HData::Hval(cx z) const { return gauge * h_raw(*green, cfg, z); }

cx HData::Hl_val(std::size_t l, cx z) const {
  return Hval(z) / P_l(l, z);
}

cx HData::H0val(cx z) const {
  cx d = 1.0;
  for (std::size_t k = 0; k < cfg.xi.size(); ++k) {
    const int e = cfg.n_of_xi(k) + 2;
    for (int r = 0; r < e; ++r) d *= (z - cfg.xi[k]);
  }
  return Hval(z) / d;
}

cx HData::Eval(cx z) const {
  cx e = 0.0;
  for (std::size_t l = 0; l < cfg.xi.size(); ++l) {
    cx t = c0[l];
    const int e1 = cfg.n_of_xi(l) + 1;
    for (int r = 0; r < e1; ++r) t *= (z - cfg.xi[l]);
    e += t * P_l(l, z);
  }
  return e;
}

cx HData::Tval(cx z) const { return H0val(z) * std::exp(-Eval(z)); }

HData build_H(const Green& green, const VortexConfig& cfg, int deg) {
  cfg.validate();
  cfg.require_balance();
  HData h;
  h.cfg = cfg;
  h.green = std::make_shared<Green>(green);
  h.gauge = 1.0;

  const std::size_t m = cfg.xi.size();
  int nmax = 0;
  for (std::size_t l = 0; l < m; ++l) nmax = std::max(nmax, cfg.n_of_xi(l));
  h.deg = deg > 0 ? deg : 2 * nmax + 8;

  // Fit radii: stay away from the other xi's, the vortex points (zeros of
  // H^l are harmless but hurt fit accuracy) and lattice copies.
  const Torus& T = cfg.torus;
  const double diam = std::min(std::abs(T.w1), std::abs(T.w2));
  h.rfit.assign(m, 0.0);
  for (std::size_t l = 0; l < m; ++l) {
    double r = 0.25 * diam;
    for (std::size_t k = 0; k < m; ++k)
      if (k != l) r = std::min(r, 0.40 * std::abs(cfg.xi[l] - cfg.xi[k]));
    for (std::size_t j = 0; j < cfg.points.size(); ++j) {
      const double d = std::abs(cfg.xi[l] - cfg.points[j]);
      if (d > 1e-12 * diam) r = std::min(r, 0.45 * d);
    }
    // lattice copies of all singular sources
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b) {
        if (a == 0 && b == 0) continue;
        const cx s = static_cast<double>(a) * T.w1 + static_cast<double>(b) * T.w2;
        for (std::size_t k = 0; k < m; ++k)
          r = std::min(r, 0.40 * std::abs(cfg.xi[l] - (cfg.xi[k] + s)));
      }
    h.rfit[l] = r;
  }

  // Gauge: make H^1(xi_1) * P_1(xi_1) = H-leading value real positive. For a
  // single concentration point this is exactly H^1(xi_1) > 0.
  {
    // The leading product excludes concentration points, so h_raw(xi_1) is
    // finite and nonzero.
    cx v = h_raw(*h.green, cfg, cfg.xi[0]);
    if (std::abs(v) == 0.0) throw AtSingularity("gauge reference vanished");
    h.gauge = std::abs(v) / v;
  }

  // Taylor series of H^l about xi_l by circle fits, then c0 and alpha0.
  h.Hl.resize(m);
  h.c0.assign(m, 0.0);
  h.alpha0.assign(m, 0.0);
  for (std::size_t l = 0; l < m; ++l) {
    const int nl = cfg.n_of_xi(l);
    auto F = [&](cx z) { return h.Hl_val(l, z); };
    h.Hl[l] = LocalSeries::fit(F, cfg.xi[l], h.rfit[l], 0, h.deg);
    const cx h0 = h.Hl[l].coeff(0);
    if (std::abs(h0) == 0.0) throw AtSingularity("H^l vanished at xi_l");
    h.alpha0[l] = h0 / static_cast<double>(nl + 1);
    h.c0[l] = h.Hl[l].coeff(nl + 1) / (h0 * h.P_l(l, cfg.xi[l]));
  }
  return h;
}

std::function<cx(cx)> elliptic_H0_oracle(const Green& green,
                                         const VortexConfig& cfg) {
  const Torus T = cfg.torus;
  if (cfg.xi.size() != 1 || std::abs(cfg.xi[0]) > 1e-12)
    throw ConfigInvalid("oracle needs a single concentration point at 0");
  auto ell = std::make_shared<EllipticData>(T);

  // Collect distinct non-concentration points up to sign; exponent n for a
  // +/- pair (simple zeros of wp - wp(p) at both), n/2 for half-periods
  // (double zeros).
  struct Factor {
    cx wp_p;
    int expo;
  };
  auto factors = std::make_shared<std::vector<Factor>>();
  std::vector<bool> used(cfg.points.size(), false);
  for (std::size_t j = 0; j < cfg.points.size(); ++j) {
    if (used[j] || cfg.xi_index_of_vortex(j) >= 0) continue;
    const cx p = cfg.points[j];
    const cx two_p = 2.0 * p;
    const auto ts = T.to_lattice(two_p);
    const bool half_period =
        std::abs(ts.first - std::round(ts.first)) < 1e-9 &&
        std::abs(ts.second - std::round(ts.second)) < 1e-9;
    if (half_period) {
      if (cfg.mult[j] % 2 != 0)
        throw ConfigInvalid("half-period vortex point needs even multiplicity");
      factors->push_back({ell->wp(p), cfg.mult[j] / 2});
      used[j] = true;
    } else {
      // find the partner -p
      bool found = false;
      for (std::size_t k = j + 1; k < cfg.points.size(); ++k) {
        if (used[k]) continue;
        if (T.dist(cfg.points[k], -p) < 1e-9 * std::sqrt(T.area()) &&
            cfg.mult[k] == cfg.mult[j]) {
          used[j] = used[k] = true;
          found = true;
          break;
        }
      }
      if (!found) throw ConfigInvalid("configuration is not even");
      factors->push_back({ell->wp(p), cfg.mult[j]});
    }
  }

  // lam0 = |H(0)| from the asymptotics of |H0|^2 = e^{u0 + 8 pi (n+1) G}:
  // matching the |z|^{-2(n+2)} blow-up at 0 gives
  //   lam0 = e^{(4 pi (n+1) - 2 pi n0) H(0) - 2 pi sum_{j != conc} n_j G(p_j)}
  // with n0 the vortex multiplicity carried by the concentration point.
  const int n = cfg.n_of_xi(0);
  int n0 = 0;
  double gsum = 0.0;
  for (std::size_t j = 0; j < cfg.points.size(); ++j) {
    if (cfg.xi_index_of_vortex(j) >= 0)
      n0 = cfg.mult[j];
    else
      gsum += cfg.mult[j] * green.G(cfg.points[j]);
  }
  const double lam0 =
      std::exp((4.0 * kPi * (n + 1) - 2.0 * kPi * n0) * green.H(0.0) -
               2.0 * kPi * gsum);

  return [ell, factors, lam0](cx z) {
    cx acc = lam0;
    const cx w = ell->wp(z);
    for (const auto& f : *factors)
      for (int r = 0; r < f.expo; ++r) acc *= (w - f.wp_p);
    return acc;
  };
}

}  // namespace cshv
